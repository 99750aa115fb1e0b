#include "support/oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace asc_test {

std::vector<std::pair<std::string, double>> brute_nearest(const std::vector<std::string>& ids,
                                                          const aspectscope::Matrix& vectors,
                                                          const std::vector<double>& query,
                                                          std::size_t k) {
  std::vector<std::pair<std::string, double>> all;
  for (std::size_t r = 0; r < ids.size(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < query.size(); ++c) {
      const double d = vectors(r, c) - query[c];
      s += d * d;
    }
    all.emplace_back(ids[r], std::sqrt(s));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool word_char(unsigned char c) { return std::isalnum(c) || c == '-' || c >= 0x80; }

bool whole_word_at(const std::string& text, std::size_t pos, std::size_t len) {
  if (pos > 0 && word_char(static_cast<unsigned char>(text[pos - 1]))) return false;
  if (pos + len < text.size() && word_char(static_cast<unsigned char>(text[pos + len]))) {
    return false;
  }
  return true;
}

bool contains_word(const std::string& text, const std::string& term) {
  for (std::size_t pos = text.find(term); pos != std::string::npos;
       pos = text.find(term, pos + 1)) {
    if (whole_word_at(text, pos, term.size())) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> naive_search(const std::vector<aspectscope::PaperRecord>& papers,
                                      const std::string& query, bool any) {
  std::vector<std::string> terms;
  std::istringstream in(lower(query));
  for (std::string t; in >> t;) terms.push_back(t);
  std::vector<const aspectscope::PaperRecord*> hits;
  for (const auto& p : papers) {
    const std::string text = lower(p.abstract);
    std::size_t matched = 0;
    for (const auto& t : terms) matched += contains_word(text, t) ? 1 : 0;
    if (any ? matched > 0 : matched == terms.size()) hits.push_back(&p);
  }
  std::sort(hits.begin(), hits.end(), [](const auto* a, const auto* b) {
    if (a->publish_time.has_value() != b->publish_time.has_value()) {
      return a->publish_time.has_value();
    }
    if (a->publish_time && *a->publish_time != *b->publish_time) {
      return *a->publish_time > *b->publish_time;
    }
    return a->paper_id < b->paper_id;
  });
  std::vector<std::string> ids;
  for (const auto* p : hits) ids.push_back(p->paper_id);
  return ids;
}

std::vector<OracleSpan> brute_entities(const std::map<std::string, std::string>& form_to_cui,
                                       const std::string& text) {
  const std::string t = lower(text);
  std::vector<OracleSpan> candidates;
  for (std::size_t pos = 0; pos < t.size(); ++pos) {
    for (const auto& [form, cui] : form_to_cui) {
      if (t.compare(pos, form.size(), form) == 0 && whole_word_at(t, pos, form.size())) {
        candidates.push_back({pos, pos + form.size(), cui});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end > b.end;
  });
  std::vector<OracleSpan> chosen;
  std::size_t next_free = 0;
  for (const auto& c : candidates) {
    if (c.start < next_free) continue;
    chosen.push_back(c);
    next_free = c.end;
  }
  return chosen;
}

double silhouette(const std::vector<std::pair<double, double>>& points,
                  const std::vector<int>& labels) {
  const std::size_t n = points.size();
  std::set<int> clusters(labels.begin(), labels.end());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0.0;
    double b = INFINITY;
    for (int c : clusters) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] != c || j == i) continue;
        sum += std::hypot(points[i].first - points[j].first, points[i].second - points[j].second);
        ++count;
      }
      if (count == 0) continue;
      const double mean = sum / static_cast<double>(count);
      if (c == labels[i]) {
        a = mean;
      } else {
        b = std::min(b, mean);
      }
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

double normalized_mutual_information(const std::vector<std::size_t>& a,
                                     const std::vector<std::size_t>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::size_t, double> pa, pb;
  std::map<std::pair<std::size_t, std::size_t>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
    pab[{a[i], b[i]}] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [key, p] : pab) mi += p * std::log(p / (pa[key.first] * pb[key.second]));
  auto entropy = [](const std::map<std::size_t, double>& m) {
    double h = 0.0;
    for (const auto& [k, p] : m) h -= p * std::log(p);
    return h;
  };
  const double ha = entropy(pa);
  const double hb = entropy(pb);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  return 2.0 * mi / (ha + hb);
}

}  // namespace asc_test
