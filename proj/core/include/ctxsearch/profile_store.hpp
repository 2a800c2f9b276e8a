#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ctxsearch/lexicon.hpp"
#include "ctxsearch/meta_keyword.hpp"
#include "ctxsearch/term_vector.hpp"

namespace ctxsearch {

/// A concept chosen during a search, with its label already normalized so the
/// entry can be vectorized without the ontology at hand.
struct SelectedConcept {
  std::string concept_id;
  std::vector<std::string> label_terms;

  bool operator==(const SelectedConcept&) const = default;
};

/// One captured search interaction.
struct ProfileEntry {
  std::string entry_id;
  std::string user_id;
  std::int64_t timestamp_ms = 0;
  std::string raw_query;
  std::vector<std::string> query_keywords;
  std::vector<DisambiguatedTerm> selected_terms;
  std::vector<MetaKeyword> selected_meta_keywords;
  std::vector<SelectedConcept> selected_concepts;
  std::vector<std::string> clicked_urls;
  std::vector<MetaKeyword> extracted_meta_keywords;

  bool operator==(const ProfileEntry&) const = default;
};

/// A user's entries in recording order. When `log_path` is set every
/// recorded entry is appended to that file before the call returns.
struct PersonalProfile {
  std::string user_id;
  std::vector<ProfileEntry> entries;
  std::filesystem::path log_path;

  bool operator==(const PersonalProfile& o) const {
    return user_id == o.user_id && entries == o.entries;
  }
};

/// Anonymized entries pooled across users.
struct SharedKnowledgeBase {
  std::vector<ProfileEntry> entries;
  std::map<std::string, int> contributor_count;
  std::filesystem::path log_path;

  bool operator==(const SharedKnowledgeBase& o) const {
    return entries == o.entries && contributor_count == o.contributor_count;
  }
};

/// Appends `entry` and persists it. Throws ValidationError on a user-id
/// mismatch, an empty keyword list, a duplicate entry id, or a timestamp
/// older than the last entry; StorageError if the write fails (the profile is
/// then left unchanged).
void record_entry(PersonalProfile& profile, ProfileEntry entry);

/// Replaces the entry with the same id and re-persists it.
/// Throws ValidationError when no such entry exists.
void update_entry(PersonalProfile& profile, const ProfileEntry& entry);

/// Raw term counts over keywords, selected sense words, selected and
/// extracted meta keyword words, and selected concept labels.
TermVector entry_vector(const ProfileEntry& entry);

/// Adds an anonymized copy of `entry`, or bumps the contributor count of an
/// existing entry with an identical entry_vector. Returns the SCKB id.
std::string merge_into_sckb(SharedKnowledgeBase& sckb, const ProfileEntry& entry);

/// Loaders accept the append-only log: a later record with an already seen
/// entry_id supersedes the earlier one in place. A missing file yields an
/// empty store. ParseError::location() is the 1-based record number.
PersonalProfile load_profile(const std::filesystem::path& path, const std::string& user_id);
SharedKnowledgeBase load_sckb(const std::filesystem::path& path);

/// Writes a compacted log (one record per entry) replacing `path`.
void save_profile(const PersonalProfile& profile, const std::filesystem::path& path);
void save_sckb(const SharedKnowledgeBase& sckb, const std::filesystem::path& path);

/// Newest first, at most `limit` entries.
std::vector<ProfileEntry> query_entries(const PersonalProfile& profile, std::size_t limit);
std::vector<ProfileEntry> query_entries(const SharedKnowledgeBase& sckb, std::size_t limit);

/// JSON object text of one entry (one store record, no newline).
std::string entry_to_json(const ProfileEntry& entry);
ProfileEntry entry_from_json(const std::string& text);

}  // namespace ctxsearch
