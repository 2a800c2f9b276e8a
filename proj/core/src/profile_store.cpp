#include "ctxsearch/profile_store.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "ctxsearch/error.hpp"
#include "json_codec.hpp"
#include "text_util.hpp"

namespace ctxsearch {
namespace {

// Appends one line and fsyncs. Throws StorageError on any failure.
void append_line(const std::filesystem::path& path, const std::string& line) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (f == nullptr) throw StorageError("cannot open store " + path.string() + " for append");
  const bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size() &&
                  std::fputc('\n', f) != EOF && std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
  const bool closed = std::fclose(f) == 0;
  if (!ok || !closed) throw StorageError("write to store " + path.string() + " failed");
}

void write_all(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write store " + tmp.string());
    for (const auto& l : lines) out << l << '\n';
    out.flush();
    if (!out) throw StorageError("write to store " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw StorageError("cannot replace store " + path.string() + ": " + ec.message());
}

struct Record {
  ProfileEntry entry;
  int contributors = 0;
};

// Reads the log, applying later-record-wins per entry_id while keeping the
// position of the first occurrence.
std::vector<Record> read_log(const std::filesystem::path& path, bool shared) {
  std::vector<Record> records;
  if (!std::filesystem::exists(path)) return records;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read store " + path.string());
  std::unordered_map<std::string, std::size_t> position;
  std::string line;
  std::size_t record_no = 0;
  while (std::getline(in, line)) {
    line = detail::strip_cr(std::move(line));
    if (detail::trim(line).empty()) continue;
    ++record_no;
    Record rec;
    try {
      const auto j = json::parse(line);
      rec.entry = j.get<ProfileEntry>();
      if (shared) {
        rec.contributors = j.at("contributor_count").get<int>();
        if (rec.contributors < 1) throw ParseError("contributor_count must be positive", record_no);
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed store record: ") + e.what(), record_no);
    }
    if (rec.entry.entry_id.empty()) throw ParseError("store record without entry_id", record_no);
    auto [it, inserted] = position.try_emplace(rec.entry.entry_id, records.size());
    if (inserted) {
      records.push_back(std::move(rec));
    } else {
      records[it->second] = std::move(rec);
    }
  }
  return records;
}

std::string sckb_record(const ProfileEntry& entry, int contributors) {
  json j = entry;
  j["contributor_count"] = contributors;
  return j.dump();
}

}  // namespace

std::string entry_to_json(const ProfileEntry& entry) { return json(entry).dump(); }

ProfileEntry entry_from_json(const std::string& text) {
  try {
    return json::parse(text).get<ProfileEntry>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed profile entry: ") + e.what(), 1);
  }
}

void record_entry(PersonalProfile& profile, ProfileEntry entry) {
  if (entry.user_id != profile.user_id) {
    throw ValidationError("entry user '" + entry.user_id + "' does not match profile '" +
                          profile.user_id + "'");
  }
  if (entry.query_keywords.empty()) throw ValidationError("entry has no query keywords");
  if (entry.entry_id.empty()) throw ValidationError("entry has no id");
  for (const auto& e : profile.entries) {
    if (e.entry_id == entry.entry_id) throw ValidationError("duplicate entry id " + entry.entry_id);
  }
  if (!profile.entries.empty() && entry.timestamp_ms < profile.entries.back().timestamp_ms) {
    throw ValidationError("entry timestamp precedes the last recorded entry");
  }
  if (!profile.log_path.empty()) append_line(profile.log_path, entry_to_json(entry));
  profile.entries.push_back(std::move(entry));
}

void update_entry(PersonalProfile& profile, const ProfileEntry& entry) {
  for (auto& e : profile.entries) {
    if (e.entry_id != entry.entry_id) continue;
    if (entry.user_id != profile.user_id) throw ValidationError("entry user does not match profile");
    if (!profile.log_path.empty()) append_line(profile.log_path, entry_to_json(entry));
    e = entry;
    return;
  }
  throw ValidationError("no entry " + entry.entry_id + " in profile " + profile.user_id);
}

TermVector entry_vector(const ProfileEntry& entry) {
  TermVector v;
  for (const auto& k : entry.query_keywords) v.add(k);
  for (const auto& t : entry.selected_terms) {
    for (const auto& w : t.words) v.add(w);
  }
  for (const auto& m : entry.selected_meta_keywords) {
    for (const auto& w : m.words) v.add(w);
  }
  for (const auto& m : entry.extracted_meta_keywords) {
    for (const auto& w : m.words) v.add(w);
  }
  for (const auto& c : entry.selected_concepts) {
    for (const auto& w : c.label_terms) v.add(w);
  }
  return v;
}

std::string merge_into_sckb(SharedKnowledgeBase& sckb, const ProfileEntry& entry) {
  const TermVector vec = entry_vector(entry);
  for (const auto& existing : sckb.entries) {
    if (entry_vector(existing) != vec) continue;
    const int count = sckb.contributor_count[existing.entry_id] + 1;
    if (!sckb.log_path.empty()) append_line(sckb.log_path, sckb_record(existing, count));
    sckb.contributor_count[existing.entry_id] = count;
    return existing.entry_id;
  }
  ProfileEntry copy = entry;
  copy.user_id.clear();
  std::size_t seq = sckb.entries.size() + 1;
  auto make_id = [&] { return "sckb-" + std::to_string(seq); };
  while (sckb.contributor_count.contains(make_id())) ++seq;
  copy.entry_id = make_id();
  if (!sckb.log_path.empty()) append_line(sckb.log_path, sckb_record(copy, 1));
  sckb.contributor_count[copy.entry_id] = 1;
  sckb.entries.push_back(std::move(copy));
  return sckb.entries.back().entry_id;
}

PersonalProfile load_profile(const std::filesystem::path& path, const std::string& user_id) {
  PersonalProfile profile{user_id, {}, path};
  std::size_t n = 0;
  for (auto& rec : read_log(path, false)) {
    ++n;
    if (rec.entry.user_id != user_id) {
      throw ParseError("record belongs to user '" + rec.entry.user_id + "'", n);
    }
    profile.entries.push_back(std::move(rec.entry));
  }
  return profile;
}

SharedKnowledgeBase load_sckb(const std::filesystem::path& path) {
  SharedKnowledgeBase sckb;
  sckb.log_path = path;
  std::size_t n = 0;
  for (auto& rec : read_log(path, true)) {
    ++n;
    if (!rec.entry.user_id.empty()) throw ParseError("shared record exposes a user id", n);
    sckb.contributor_count[rec.entry.entry_id] = rec.contributors;
    sckb.entries.push_back(std::move(rec.entry));
  }
  return sckb;
}

void save_profile(const PersonalProfile& profile, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(profile.entries.size());
  for (const auto& e : profile.entries) lines.push_back(entry_to_json(e));
  write_all(path, lines);
}

void save_sckb(const SharedKnowledgeBase& sckb, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(sckb.entries.size());
  for (const auto& e : sckb.entries) {
    auto it = sckb.contributor_count.find(e.entry_id);
    lines.push_back(sckb_record(e, it == sckb.contributor_count.end() ? 1 : it->second));
  }
  write_all(path, lines);
}

namespace {
std::vector<ProfileEntry> newest_first(const std::vector<ProfileEntry>& entries, std::size_t limit) {
  std::vector<ProfileEntry> out;
  for (auto it = entries.rbegin(); it != entries.rend() && out.size() < limit; ++it) out.push_back(*it);
  return out;
}
}  // namespace

std::vector<ProfileEntry> query_entries(const PersonalProfile& profile, std::size_t limit) {
  return newest_first(profile.entries, limit);
}

std::vector<ProfileEntry> query_entries(const SharedKnowledgeBase& sckb, std::size_t limit) {
  return newest_first(sckb.entries, limit);
}

}  // namespace ctxsearch
