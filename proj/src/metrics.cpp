#include "mrc/metrics.hpp"

#include <iomanip>
#include <map>
#include <sstream>

#include "mrc/errors.hpp"
#include "mrc/text.hpp"

namespace mrc {

namespace {

bool is_article(const std::u32string& w) { return w == U"a" || w == U"an" || w == U"the"; }

char32_t lower(char32_t c) { return (c >= U'A' && c <= U'Z') ? c + 32 : c; }

// Every whitespace-separated word is a single code point, e.g. "a b c".
bool symbolic(const std::u32string& cps) {
  std::size_t run = 0, words = 0;
  for (char32_t c : cps) {
    if (is_whitespace(c)) {
      run = 0;
    } else if (++run == 1) {
      ++words;
    } else {
      return false;
    }
  }
  return words > 0;
}

}  // namespace

std::vector<std::string> answer_tokens(std::string_view text) {
  const std::u32string cps = utf8_decode(text);
  std::vector<std::string> out;
  if (contains_cjk(text)) {
    for (char32_t c : cps)
      if (!is_whitespace(c)) out.push_back(utf8_encode(std::u32string_view(&c, 1)));
    return out;
  }
  if (symbolic(cps)) {
    for (char32_t c : cps)
      if (!is_whitespace(c)) out.push_back(utf8_encode(std::u32string_view(&c, 1)));
    return out;
  }
  std::u32string word;
  auto flush = [&] {
    if (!word.empty() && !is_article(word)) out.push_back(utf8_encode(word));
    word.clear();
  };
  for (char32_t c : cps) {
    if (is_whitespace(c)) {
      flush();
    } else if (!is_punctuation(c)) {
      word.push_back(lower(c));
    }
  }
  flush();
  return out;
}

std::string normalize_answer(std::string_view text) {
  const auto toks = answer_tokens(text);
  const std::string sep = contains_cjk(text) ? "" : " ";
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += sep;
    out += toks[i];
  }
  return out;
}

int exact_match(std::string_view prediction, std::string_view gold) {
  return answer_tokens(prediction) == answer_tokens(gold) ? 1 : 0;
}

double token_f1(std::string_view prediction, std::string_view gold) {
  const auto p = answer_tokens(prediction);
  const auto g = answer_tokens(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::map<std::string, std::size_t> bag;
  for (const auto& t : g) ++bag[t];
  std::size_t common = 0;
  for (const auto& t : p) {
    auto it = bag.find(t);
    if (it != bag.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = double(common) / double(p.size());
  const double recall = double(common) / double(g.size());
  return 2 * precision * recall / (precision + recall);
}

int exact_match_any(std::string_view prediction, const std::vector<std::string>& golds) {
  if (golds.empty()) return exact_match(prediction, "");
  int best = 0;
  for (const auto& g : golds) best = std::max(best, exact_match(prediction, g));
  return best;
}

double token_f1_any(std::string_view prediction, const std::vector<std::string>& golds) {
  if (golds.empty()) return token_f1(prediction, "");
  double best = 0;
  for (const auto& g : golds) best = std::max(best, token_f1(prediction, g));
  return best;
}

const SubsetScore& EvalReport::subset(const std::string& name) const {
  for (const auto& s : subsets)
    if (s.name == name) return s;
  throw UsageError("report has no subset " + name);
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "dataset: " << dataset << "\n";
  os << "overall: EM " << em << "  F1 " << f1 << "  (n=" << count << ")\n";
  for (const auto& s : subsets) os << "  " << s.name << ": EM " << s.em << "  F1 " << s.f1 << "  (n=" << s.count << ")\n";
  return os.str();
}

std::string EvalReport::to_kv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "dataset=" << dataset << "\n";
  os << "all.em=" << em << "\nall.f1=" << f1 << "\nall.count=" << count << "\n";
  for (const auto& s : subsets)
    os << s.name << ".em=" << s.em << "\n" << s.name << ".f1=" << s.f1 << "\n" << s.name << ".count=" << s.count << "\n";
  return os.str();
}

EvalReport score_predictions(const std::string& dataset, const std::vector<ScoredSample>& samples) {
  struct Acc {
    double em = 0, f1 = 0;
    std::size_t n = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> per;
  Acc all;
  for (const auto& s : samples) {
    const double em = exact_match_any(s.prediction, s.golds);
    const double f1 = token_f1_any(s.prediction, s.golds);
    if (!per.count(s.subset)) order.push_back(s.subset);
    Acc& a = per[s.subset];
    a.em += em;
    a.f1 += f1;
    ++a.n;
    all.em += em;
    all.f1 += f1;
    ++all.n;
  }
  auto pct = [](double v, std::size_t n) { return n ? 100.0 * v / double(n) : 0.0; };
  EvalReport r;
  r.dataset = dataset;
  r.count = all.n;
  r.em = pct(all.em, all.n);
  r.f1 = pct(all.f1, all.n);
  for (const auto& name : order) {
    const Acc& a = per[name];
    r.subsets.push_back({name, pct(a.em, a.n), pct(a.f1, a.n), a.n});
  }
  return r;
}

}  // namespace mrc
