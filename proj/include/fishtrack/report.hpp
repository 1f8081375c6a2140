#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fishtrack/metrics_detection.hpp"
#include "fishtrack/metrics_tracking.hpp"
#include "fishtrack/mot_io.hpp"

namespace fishtrack {

/// Flat, ordered key -> value report.
class Report {
 public:
  struct Entry {
    std::string key;
    std::string value;
    bool numeric = true;
  };

  void add(std::string key, double value) { entries_.push_back({std::move(key), format_fixed(value), true}); }
  void add(std::string key, std::size_t value) { entries_.push_back({std::move(key), std::to_string(value), true}); }
  void add(std::string key, bool value) { entries_.push_back({std::move(key), value ? "true" : "false", false}); }
  void add_text(std::string key, std::string value) {
    entries_.push_back({std::move(key), std::move(value), false});
  }

  const std::vector<Entry>& entries() const { return entries_; }

  void append(const Report& other) { entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end()); }

  void write_csv(std::ostream& out) const {
    out << "key,value\n";
    for (const auto& e : entries_) out << e.key << ',' << e.value << '\n';
  }

  void write_table(std::ostream& out) const {
    std::size_t width = 0;
    for (const auto& e : entries_) width = std::max(width, e.key.size());
    for (const auto& e : entries_) out << e.key << std::string(width - e.key.size() + 2, ' ') << e.value << '\n';
  }

 private:
  std::vector<Entry> entries_;
};

inline std::string alpha_key(double alpha) { return format_fixed(alpha, 2); }

inline Report make_tracking_report(const TrackingEvalResult& r, bool per_alpha) {
  Report rep;
  rep.add("idf1", r.idf1);
  rep.add("mota", r.mota);
  rep.add("hota", r.hota);
  rep.add("deta", r.deta);
  rep.add("assa", r.assa);
  rep.add("idsw", r.idsw);
  rep.add("fp", r.fp);
  rep.add("fn", r.fn);
  rep.add("gt_count", r.gt_count);
  if (per_alpha) {
    for (const auto& [alpha, h] : r.per_alpha) {
      const std::string k = alpha_key(alpha);
      rep.add("hota@" + k, h.hota);
      rep.add("deta@" + k, h.deta);
      rep.add("assa@" + k, h.assa);
    }
  }
  return rep;
}

inline Report make_detection_report(const DetectionEvalResult& r) {
  Report rep;
  rep.add("precision", r.precision);
  rep.add("recall", r.recall);
  rep.add("map50", r.map50);
  rep.add("map50_95", r.map50_95);
  rep.add("det_tp", r.tp);
  rep.add("det_fp", r.fp);
  rep.add("det_fn", r.fn);
  rep.add("precision_undefined", r.precision_undefined);
  rep.add("recall_undefined", r.recall_undefined);
  for (const auto& [t, ap] : r.ap_per_threshold) rep.add("ap@" + alpha_key(t), ap);
  return rep;
}

}  // namespace fishtrack
