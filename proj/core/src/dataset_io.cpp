#include "orl/datastore/dataset_io.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "orl/error.hpp"

namespace orl {

namespace {

using json = nlohmann::ordered_json;

bool is_gzip_path(const std::filesystem::path& path) { return path.extension() == ".gz"; }

void append_double(std::string& out, double v) {
  if (v == 0.0 && std::signbit(v)) {
    out += "-0.0";
    return;
  }
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_vector(std::string& out, const std::vector<double>& xs) {
  out += '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    append_double(out, xs[i]);
  }
  out += ']';
}

std::string header_line(const DatasetHeader& h) {
  json j;
  j["format_version"] = h.format_version;
  j["feature_names"] = h.feature_names;
  j["action_count"] = h.action_count;
  j["env_config_hash"] = h.env_config_hash;
  j["collection_seed"] = h.collection_seed;
  j["episode_count"] = h.episode_count;
  j["transition_count"] = h.transition_count;
  return j.dump();
}

void append_transition(std::string& out, const Transition& tr) {
  out += "{\"episode_id\":";
  out += std::to_string(tr.episode_id);
  out += ",\"t\":";
  out += std::to_string(tr.t);
  out += ",\"s\":";
  append_vector(out, tr.state);
  out += ",\"a\":";
  out += std::to_string(tr.action);
  out += ",\"r\":{\"state_based\":";
  append_double(out, tr.reward.state_based);
  out += ",\"action_based\":";
  append_double(out, tr.reward.action_based);
  out += ",\"terminal\":";
  append_double(out, tr.reward.terminal);
  out += "},\"s_next\":";
  append_vector(out, tr.next_state);
  out += ",\"done\":";
  out += tr.done ? "true" : "false";
  out += ",\"truncated\":";
  out += tr.truncated ? "true" : "false";
  out += ",\"propensity\":";
  append_double(out, tr.propensity);
  out += "}\n";
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw ValidationError("malformed dataset line " + std::to_string(line) + ": " + what);
}

DatasetHeader parse_header(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    malformed(1, e.what());
  }
  DatasetHeader h;
  try {
    h.format_version = j.at("format_version").get<int>();
    if (h.format_version != kDatasetFormatVersion) {
      throw ValidationError("dataset format_version " + std::to_string(h.format_version) +
                            " is not supported (expected " + std::to_string(kDatasetFormatVersion) + ")");
    }
    h.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    h.action_count = j.at("action_count").get<int>();
    h.env_config_hash = j.at("env_config_hash").get<std::string>();
    h.collection_seed = j.at("collection_seed").get<std::uint64_t>();
    h.episode_count = j.at("episode_count").get<std::uint64_t>();
    h.transition_count = j.at("transition_count").get<std::uint64_t>();
  } catch (const json::exception& e) {
    malformed(1, e.what());
  }
  return h;
}

Transition parse_transition(const std::string& line, std::size_t line_no) {
  Transition tr;
  try {
    json j = json::parse(line);
    tr.episode_id = j.at("episode_id").get<std::int64_t>();
    tr.t = j.at("t").get<std::int64_t>();
    tr.state = j.at("s").get<std::vector<double>>();
    tr.action = j.at("a").get<int>();
    const auto& r = j.at("r");
    tr.reward.state_based = r.at("state_based").get<double>();
    tr.reward.action_based = r.at("action_based").get<double>();
    tr.reward.terminal = r.at("terminal").get<double>();
    tr.next_state = j.at("s_next").get<std::vector<double>>();
    tr.done = j.at("done").get<bool>();
    tr.truncated = j.at("truncated").get<bool>();
    tr.propensity = j.at("propensity").get<double>();
  } catch (const json::exception& e) {
    malformed(line_no, e.what());
  }
  if (!(tr.propensity > 0.0 && tr.propensity <= 1.0)) {
    std::ostringstream os;
    os << "dataset line " << line_no << ": propensity " << tr.propensity << " outside (0, 1]";
    throw ValidationError(os.str());
  }
  return tr;
}

std::string read_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("dataset file not found: " + path.string());
  if (is_gzip_path(path)) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path.string());
    std::string out;
    char buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
    int err = 0;
    const char* msg = gzerror(f, &err);
    gzclose(f);
    if (n < 0 || (err != Z_OK && err != Z_STREAM_END)) {
      throw ValidationError("corrupt compressed dataset " + path.string() + ": " + msg);
    }
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (is_gzip_path(path)) {
    gzFile f = gzopen(path.c_str(), "wb9");
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    std::size_t off = 0;
    while (off < bytes.size()) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(bytes.size() - off, 1u << 20));
      if (gzwrite(f, bytes.data() + off, chunk) != static_cast<int>(chunk)) {
        gzclose(f);
        throw IoError("write failed: " + path.string());
      }
      off += chunk;
    }
    if (gzclose(f) != Z_OK) throw IoError("write failed: " + path.string());
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string encode_dataset(const Dataset& dataset) {
  require_valid(dataset);
  std::string out = header_line(dataset.header);
  out += '\n';
  out.reserve(out.size() + dataset.transition_count() * 256);
  for (const auto& ep : dataset.episodes) {
    for (const auto& tr : ep.steps) append_transition(out, tr);
  }
  return out;
}

Dataset decode_dataset(const std::string& text) {
  Dataset ds;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    ++line_no;
    if (end == std::string::npos) malformed(line_no, "line is not newline-terminated (truncated file?)");
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!have_header) {
      ds.header = parse_header(line);
      have_header = true;
      continue;
    }
    Transition tr = parse_transition(line, line_no);
    if (ds.episodes.empty() || ds.episodes.back().id != tr.episode_id) {
      ds.episodes.push_back(Episode{tr.episode_id, {}});
    }
    ds.episodes.back().steps.push_back(std::move(tr));
  }
  if (!have_header) malformed(1, "missing header line");
  require_valid(ds);
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  write_file(path, encode_dataset(dataset));
}

Dataset read_dataset(const std::filesystem::path& path) {
  try {
    return decode_dataset(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace orl
