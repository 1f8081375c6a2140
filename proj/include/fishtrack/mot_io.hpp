#pragma once

// MOTChallenge-style text files:
//   frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
// Frames are 1-based on disk and 0-based in memory. Detections use id -1.
// Writers emit fixed 6-decimal floats via std::to_chars, so output never
// depends on the process locale.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "fishtrack/annotations.hpp"
#include "fishtrack/errors.hpp"
#include "fishtrack/locomotion.hpp"

namespace fishtrack {

enum class MotKind { detections, tracks, ground_truth };

inline std::string format_fixed(double value, int precision = 6) {
  char buf[64];
  if (value == 0.0) value = 0.0;  // no "-0.000000"
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
  if (res.ec != std::errc{}) throw InvalidInput("value cannot be formatted");
  std::string s(buf, res.ptr);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_number(std::string_view field, std::size_t line, const char* name) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw ParseError(line, std::string("field '") + name + "' is not a finite number: '" + std::string(field) + "'");
  }
  return value;
}

inline int parse_integral(std::string_view field, std::size_t line, const char* name) {
  const double v = parse_number(field, line, name);
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw ParseError(line, std::string("field '") + name + "' must be an integer");
  }
  return static_cast<int>(v);
}

}  // namespace detail

/// Loads a MOT file. Blank lines are skipped, columns after the seventh are
/// ignored, a missing confidence column defaults to 1, and rows are stably
/// sorted by frame.
inline SequenceAnnotations parse_mot(std::istream& in, MotKind kind) {
  struct Row {
    int frame;
    Annotation ann;
  };
  std::vector<Row> rows;
  std::set<std::pair<int, int>> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    const auto f = detail::split_fields(line);
    if (f.size() < 6) throw ParseError(line_no, "expected at least 6 comma-separated fields");

    const int frame = detail::parse_integral(f[0], line_no, "frame");
    if (frame < 1) throw ParseError(line_no, "frame index must be >= 1");
    const int id = detail::parse_integral(f[1], line_no, "id");
    Annotation ann;
    ann.box = {detail::parse_number(f[2], line_no, "bb_left"), detail::parse_number(f[3], line_no, "bb_top"),
               detail::parse_number(f[4], line_no, "bb_width"), detail::parse_number(f[5], line_no, "bb_height")};
    if (!ann.box.is_valid()) throw ParseError(line_no, "box width and height must be non-negative");
    ann.score = f.size() >= 7 ? detail::parse_number(f[6], line_no, "conf") : 1.0;

    if (kind == MotKind::detections) {
      if (id != -1 && id < 1) throw ParseError(line_no, "detection id must be -1 or positive");
      if (id > 0) ann.id = id;
    } else {
      if (id < 1) throw ParseError(line_no, "track id must be positive");
      if (!seen.emplace(frame, id).second) {
        throw ParseError(line_no, "duplicate identity " + std::to_string(id) + " in frame " + std::to_string(frame));
      }
      ann.id = id;
    }
    rows.push_back({frame - 1, ann});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.frame < b.frame; });
  SequenceAnnotations out;
  for (auto& r : rows) out.add(r.frame, std::move(r.ann));
  return out;
}

/// Writes one line per box ordered by frame then id. Detections without an
/// identity are written with id -1 and keep their input order.
inline void write_mot(std::ostream& out, const SequenceAnnotations& seq, MotKind kind) {
  for (const auto& [frame, boxes] : seq.frames) {
    if (kind != MotKind::detections) {
      for (const auto& a : boxes) {
        if (!a.id) throw InvalidInput("track and ground-truth boxes need an identity");
      }
    }
    std::vector<const Annotation*> sorted;
    sorted.reserve(boxes.size());
    for (const auto& a : boxes) sorted.push_back(&a);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Annotation* a, const Annotation* b) { return a->id.value_or(-1) < b->id.value_or(-1); });
    for (const Annotation* a : sorted) {
      out << std::to_string(frame + 1) << ',' << std::to_string(a->id.value_or(-1)) << ','
          << format_fixed(a->box.left) << ',' << format_fixed(a->box.top) << ',' << format_fixed(a->box.width) << ','
          << format_fixed(a->box.height) << ',' << format_fixed(a->score) << ",-1,-1,-1\n";
    }
  }
}

inline std::string to_mot_string(const SequenceAnnotations& seq, MotKind kind) {
  std::ostringstream os;
  write_mot(os, seq, kind);
  return os.str();
}

inline SequenceAnnotations read_mot_file(const std::string& path, MotKind kind) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    auto seq = parse_mot(in, kind);
    seq.name = path;
    return seq;
  } catch (const ParseError& e) {
    throw ParseError(path, e);
  }
}

inline void write_mot_file(const std::string& path, const SequenceAnnotations& seq, MotKind kind) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  write_mot(out, seq, kind);
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

/// `bin_left,bin_right,count,weight`; the weight column is left empty when
/// the histogram holds no samples.
inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_left,bin_right,count,weight\n";
  const auto weights = h.normalized();
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << format_fixed(h.bin_edges[i]) << ',' << format_fixed(h.bin_edges[i + 1]) << ',' << std::to_string(h.counts[i]) << ',';
    if (weights) out << format_fixed((*weights)[i]);
    out << '\n';
  }
}

/// Standalone 800x400 SVG bar chart of a histogram's weights.
inline void write_histogram_svg(std::ostream& out, const Histogram& h, const std::string& title,
                                const std::string& x_label) {
  constexpr double width = 800.0, height = 400.0;
  constexpr double margin_l = 60.0, margin_r = 20.0, margin_t = 40.0, margin_b = 50.0;
  const double plot_w = width - margin_l - margin_r;
  const double plot_h = height - margin_t - margin_b;
  const auto weights = h.normalized().value_or(std::vector<double>(h.counts.size(), 0.0));
  const double top = std::max(1e-12, *std::max_element(weights.begin(), weights.end()));
  const double bar_w = plot_w / static_cast<double>(h.counts.size());

  auto num = [](double v) { return format_fixed(v, 2); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" viewBox=\"0 0 800 400\">\n";
  out << "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << title
      << "</text>\n";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double bh = plot_h * weights[i] / top;
    out << "<rect x=\"" << num(margin_l + bar_w * static_cast<double>(i) + 1.0) << "\" y=\""
        << num(margin_t + plot_h - bh) << "\" width=\"" << num(std::max(bar_w - 2.0, 1.0)) << "\" height=\""
        << num(bh) << "\" fill=\"steelblue\"/>\n";
  }
  out << "<line x1=\"" << num(margin_l) << "\" y1=\"" << num(margin_t + plot_h) << "\" x2=\"" << num(width - margin_r)
      << "\" y2=\"" << num(margin_t + plot_h) << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < h.bin_edges.size(); i += std::max<std::size_t>(1, h.counts.size() / 6)) {
    out << "<text x=\"" << num(margin_l + bar_w * static_cast<double>(i)) << "\" y=\"" << num(margin_t + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_fixed(h.bin_edges[i], 1)
        << "</text>\n";
  }
  out << "<text x=\"400\" y=\"390\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"200\" transform=\"rotate(-90 16 200)\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">weight</text>\n";
  out << "</svg>\n";
}

}  // namespace fishtrack
