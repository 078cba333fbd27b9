#pragma once

// CSV writers/readers for the stats, features and manifest formats. Doubles
// are written with shortest round-trip formatting so re-reading is exact.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mhaec/events.hpp"
#include "mhaec/features.hpp"
#include "mhaec/stats.hpp"
#include "mhaec/wav.hpp"  // io_error

namespace mhaec {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

inline double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& path,
                               std::size_t line_no) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": bad integer '" + s + "'");
  return v;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

// ---- stats trajectory: frame,P_m,P_s,P_d,U_m,U_s ----

inline void write_stats_csv(const std::string& path, std::span<const StatsVector> rows) {
  auto out = detail::open_out(path);
  out << "frame,P_m,P_s,P_d,U_m,U_s\n";
  for (const StatsVector& s : rows) {
    out << s.frame_index << ',' << format_double(s.p_m) << ',' << format_double(s.p_s) << ','
        << format_double(s.p_d) << ',' << format_double(s.u_m) << ',' << format_double(s.u_s)
        << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

inline std::vector<StatsVector> read_stats_csv(const std::string& path) {
  auto in = detail::open_in(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<StatsVector> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (detail::split_csv_line(line) != std::vector<std::string>{"frame", "P_m", "P_s", "P_d",
                                                                   "U_m", "U_s"})
        throw std::invalid_argument(path + ":1: bad stats header");
      continue;
    }
    const auto f = detail::split_csv_line(line);
    if (f.size() != 6)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 6 fields");
    StatsVector s;
    s.frame_index = static_cast<std::int64_t>(detail::parse_u64(f[0], path, line_no));
    s.p_m = detail::parse_double(f[1], path, line_no);
    s.p_s = detail::parse_double(f[2], path, line_no);
    s.p_d = detail::parse_double(f[3], path, line_no);
    s.u_m = detail::parse_double(f[4], path, line_no);
    s.u_s = detail::parse_double(f[5], path, line_no);
    rows.push_back(s);
  }
  return rows;
}

// ---- features: label,seed,f0..f14 ----

inline void write_features_csv(const std::string& path, std::span<const EventRecord> records) {
  auto out = detail::open_out(path);
  out << "label,seed";
  for (std::size_t d = 0; d < kFeatureDim; ++d) out << ",f" << d;
  out << '\n';
  for (const EventRecord& r : records) {
    out << to_string(r.label) << ',' << r.seed;
    for (double v : r.features.v) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

inline std::vector<EventRecord> read_features_csv(const std::string& path) {
  auto in = detail::open_in(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<EventRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (line_no == 1) {
      if (f.size() != 2 + kFeatureDim || f[0] != "label" || f[1] != "seed")
        throw std::invalid_argument(path + ":1: bad features header");
      continue;
    }
    if (f.size() != 2 + kFeatureDim)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(2 + kFeatureDim) + " fields");
    EventRecord r;
    try {
      r.label = event_class_from_string(f[0]);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    r.seed = detail::parse_u64(f[1], path, line_no);
    for (std::size_t d = 0; d < kFeatureDim; ++d)
      r.features.v[d] = detail::parse_double(f[2 + d], path, line_no);
    records.push_back(r);
  }
  return records;
}

// ---- dataset manifest: id,label,seed,path_ref,path_mic,event_start_s,event_dur_s ----

struct ManifestRow {
  std::string id;
  EventClass label = EventClass::SteadyState;
  std::uint64_t seed = 0;
  std::string path_ref;
  std::string path_mic;
  double event_start_s = 0.0;
  double event_dur_s = 0.0;
};

inline void write_manifest_csv(const std::string& path, std::span<const ManifestRow> rows) {
  auto out = detail::open_out(path);
  out << "id,label,seed,path_ref,path_mic,event_start_s,event_dur_s\n";
  for (const ManifestRow& r : rows) {
    out << r.id << ',' << to_string(r.label) << ',' << r.seed << ',' << r.path_ref << ','
        << r.path_mic << ',' << format_double(r.event_start_s) << ','
        << format_double(r.event_dur_s) << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

inline std::vector<ManifestRow> read_manifest_csv(const std::string& path) {
  auto in = detail::open_in(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<ManifestRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (line_no == 1) {
      if (f.size() != 7 || f[0] != "id")
        throw std::invalid_argument(path + ":1: bad manifest header");
      continue;
    }
    if (f.size() != 7)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected 7 fields");
    ManifestRow r;
    r.id = f[0];
    try {
      r.label = event_class_from_string(f[1]);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    r.seed = detail::parse_u64(f[2], path, line_no);
    r.path_ref = f[3];
    r.path_mic = f[4];
    r.event_start_s = detail::parse_double(f[5], path, line_no);
    r.event_dur_s = detail::parse_double(f[6], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

// ---- confusion matrix ----

inline void write_confusion_csv(const std::string& path, const LooResult& loo) {
  auto out = detail::open_out(path);
  out << "true_label";
  for (EventClass c : kAllEventClasses) out << ',' << to_string(c);
  out << '\n';
  for (std::size_t t = 0; t < kEventClassCount; ++t) {
    out << to_string(static_cast<EventClass>(t));
    for (std::size_t p = 0; p < kEventClassCount; ++p) out << ',' << loo.confusion[t][p];
    out << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

inline std::string format_confusion_text(const LooResult& loo) {
  std::ostringstream out;
  out << "LOO accuracy: " << format_double(loo.accuracy) << "\n\n";
  out << "true \\ predicted";
  for (EventClass c : kAllEventClasses) {
    out << "  ";
    out.width(14);
    out << to_string(c);
  }
  out << '\n';
  for (std::size_t t = 0; t < kEventClassCount; ++t) {
    out.width(16);
    out << to_string(static_cast<EventClass>(t));
    for (std::size_t p = 0; p < kEventClassCount; ++p) {
      out << "  ";
      out.width(14);
      out << loo.confusion[t][p];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mhaec
