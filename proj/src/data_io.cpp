#include "mrc/data_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mrc/errors.hpp"
#include "mrc/rng.hpp"

namespace mrc {

using ojson = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path + " for writing");
  f << body;
}

// Answer text must occur at the stated code-point offset.
bool answer_at(const std::u32string& passage, const Answer& a) {
  const std::u32string ans = utf8_decode(a.text);
  if (ans.empty() || a.start + ans.size() > passage.size()) return false;
  return passage.compare(a.start, ans.size(), ans) == 0;
}

}  // namespace

MrcLoadResult parse_mrc_json(std::string_view json_text, const std::string& language, const std::string& source) {
  ojson root;
  try {
    root = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    throw DataError(source + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  MrcLoadResult out;
  try {
    const auto& data = root.at("data");
    std::size_t auto_id = 0;
    for (const auto& article : data) {
      for (const auto& para : article.at("paragraphs")) {
        const std::string context = para.at("context").get<std::string>();
        const std::u32string context_cps = utf8_decode(context);
        for (const auto& qa : para.at("qas")) {
          MrcRecord rec;
          rec.id = qa.contains("id") ? qa["id"].get<std::string>() : source + "#" + std::to_string(auto_id);
          ++auto_id;
          rec.passage = context;
          rec.question = qa.at("question").get<std::string>();
          rec.language = language;
          for (const auto& ans : qa.at("answers"))
            rec.answers.push_back({ans.at("text").get<std::string>(), ans.at("answer_start").get<std::size_t>()});
          std::string reason;
          if (rec.answers.empty()) reason = "no answers";
          for (const auto& a : rec.answers)
            if (reason.empty() && !answer_at(context_cps, a))
              reason = "answer '" + a.text + "' not found at offset " + std::to_string(a.start);
          if (reason.empty() && rec.question.empty()) reason = "empty question";
          if (!reason.empty()) {
            ++out.dropped;
            out.drop_reasons.push_back(rec.id + ": " + reason);
            continue;
          }
          out.records.push_back(std::move(rec));
        }
      }
    }
  } catch (const ojson::exception& e) {
    throw DataError(source + ": schema error: " + e.what());
  }
  return out;
}

MrcLoadResult load_mrc_json(const std::string& path, const std::string& language) {
  return parse_mrc_json(read_file(path), language, path);
}

std::string mrc_json_text(const std::vector<MrcRecord>& records, const std::string& title) {
  ojson paragraphs = ojson::array();
  for (std::size_t i = 0; i < records.size();) {
    ojson qas = ojson::array();
    std::size_t j = i;
    for (; j < records.size() && records[j].passage == records[i].passage; ++j) {
      ojson answers = ojson::array();
      for (const auto& a : records[j].answers) answers.push_back({{"text", a.text}, {"answer_start", a.start}});
      qas.push_back({{"id", records[j].id}, {"question", records[j].question}, {"answers", answers}});
    }
    paragraphs.push_back({{"context", records[i].passage}, {"qas", qas}});
    i = j;
  }
  ojson root = {{"version", "1.0"}, {"data", ojson::array({{{"title", title}, {"paragraphs", paragraphs}}})}};
  return root.dump(1) + "\n";
}

void write_mrc_json(const std::string& path, const std::vector<MrcRecord>& records, const std::string& title) {
  write_file(path, mrc_json_text(records, title));
}

std::vector<NliRecord> parse_nli_pairs(std::string_view text, const std::string& source) {
  std::vector<NliRecord> out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos)
      throw DataError(source + ":" + std::to_string(lineno) + ": expected 3 tab-separated fields");
    const std::string_view label = line.substr(t2 + 1);
    if (label != "0" && label != "1")
      throw DataError(source + ":" + std::to_string(lineno) + ": label must be 0 or 1, got '" + std::string(label) + "'");
    out.push_back({std::string(line.substr(0, t1)), std::string(line.substr(t1 + 1, t2 - t1 - 1)), label == "1" ? 1 : 0});
  }
  return out;
}

std::vector<NliRecord> load_nli_pairs(const std::string& path) {
  return parse_nli_pairs(read_file(path), path);
}

void write_nli_pairs(const std::string& path, const std::vector<NliRecord>& records) {
  std::string body;
  for (const auto& r : records) body += r.s1 + '\t' + r.s2 + '\t' + (r.label ? "1" : "0") + '\n';
  write_file(path, body);
}

std::pair<std::size_t, std::size_t> align_answer_span(const std::vector<Token>& passage_tokens, std::string_view passage,
                                                      std::string_view answer, std::size_t offset) {
  const std::u32string cps = utf8_decode(passage);
  const Answer a{std::string(answer), offset};
  if (!answer_at(cps, a))
    throw DataError("answer '" + std::string(answer) + "' does not occur at offset " + std::to_string(offset));
  const std::size_t end = offset + utf8_length(answer);
  std::size_t first = passage_tokens.size(), last = 0;
  for (std::size_t i = 0; i < passage_tokens.size(); ++i) {
    const auto& t = passage_tokens[i];
    if (t.end > offset && t.begin < end) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == passage_tokens.size()) throw DataError("answer '" + std::string(answer) + "' covers no passage token");
  return {first, last};
}

// ---------------------------------------------------------------------------
// Synthetic data

void SyntheticSpec::validate() const {
  if (languages.empty()) throw DataError("synthetic spec: no languages");
  if (train_counts.size() != languages.size()) throw DataError("synthetic spec: one train count per language");
  if (vocab_size < 1 || vocab_size > 1000) throw DataError("synthetic spec: vocab_size must lie in [1, 1000]");
  if (span_len_max < 1) throw DataError("synthetic spec: span_len_max must be >= 1");
  if (passage_len_min < 2 * span_len_max + 2 || passage_len_min > passage_len_max)
    throw DataError("synthetic spec: passage length range must satisfy 2*span_len_max+2 <= min <= max");
  if (key_count < 1 || key_count > 1000) throw DataError("synthetic spec: key_count must lie in [1, 1000]");
  for (std::size_t i = 0; i < languages.size(); ++i)
    for (std::size_t j = i + 1; j < languages.size(); ++j)
      if (languages[i] == languages[j]) throw DataError("synthetic spec: duplicate language tag " + languages[i]);
}

namespace {

enum Direction { kAfter = 0, kBefore = 1 };

struct Lexicon {
  bool spaced = true;
  std::vector<std::string> filler;
  std::vector<std::string> keys;
  std::string segment_end;
  // "@" marks the key slot. All templates of a language have one length, so
  // a reworded question leaves the passage positions unchanged.
  std::vector<std::string> primary[2];
  std::vector<std::string> paraphrase[2];
};

std::string cjk(char32_t c) { return utf8_encode(std::u32string(1, c)); }

std::vector<std::string> chars(const std::u32string& s) {
  std::vector<std::string> out;
  for (char32_t c : s) out.push_back(c == U'@' ? "@" : cjk(c));
  return out;
}

// Character-written languages get CJK tokens from disjoint code-point blocks;
// everything else gets spaced symbolic words with a language prefix.
Lexicon make_lexicon(const std::string& tag, std::size_t index, const SyntheticSpec& spec) {
  Lexicon lx;
  if (tag == "zh") {
    lx.spaced = false;
    for (std::size_t i = 0; i < spec.vocab_size; ++i) lx.filler.push_back(cjk(char32_t(0x6E00 + i)));
    for (std::size_t i = 0; i < spec.key_count; ++i) lx.keys.push_back(cjk(char32_t(0x8000 + i)));
    lx.segment_end = cjk(0xFF1B);  // fullwidth semicolon
    lx.primary[kAfter] = chars(U"@后面是什么？");
    lx.primary[kBefore] = chars(U"@前面是什么？");
    lx.paraphrase[kAfter] = chars(U"@之后是哪个？");
    lx.paraphrase[kBefore] = chars(U"@之前是哪个？");
    return lx;
  }
  const std::string p = index == 0 ? "" : tag + "_";
  for (std::size_t i = 0; i < spec.vocab_size; ++i) lx.filler.push_back(p + "w" + std::to_string(i));
  for (std::size_t i = 0; i < spec.key_count; ++i) lx.keys.push_back(p + "k" + std::to_string(i));
  lx.segment_end = ";";
  lx.primary[kAfter] = {p + "what", p + "comes", p + "after", "@", "?"};
  lx.primary[kBefore] = {p + "what", p + "comes", p + "before", "@", "?"};
  lx.paraphrase[kAfter] = {p + "which", p + "item", p + "follows", "@", "?"};
  lx.paraphrase[kBefore] = {p + "which", p + "item", p + "precedes", "@", "?"};
  return lx;
}

// Filler segments hold their tokens in `before` and have no key.
struct Segment {
  std::vector<std::string> before;
  std::string key;
  std::vector<std::string> after;
};

struct Source {
  std::vector<Segment> segments;
  std::size_t target = 0;
  Direction dir = kAfter;
};

class Renderer {
 public:
  explicit Renderer(bool spaced) : spaced_(spaced) {}

  // Appends a token and returns its code-point offset.
  std::size_t push(const std::string& tok) {
    if (spaced_ && !text_.empty()) {
      text_ += ' ';
      ++len_;
    }
    const std::size_t at = len_;
    text_ += tok;
    len_ += utf8_length(tok);
    return at;
  }
  const std::string& text() const { return text_; }

 private:
  bool spaced_;
  std::string text_;
  std::size_t len_ = 0;
};

std::string render_tokens(const std::vector<std::string>& toks, bool spaced) {
  Renderer r(spaced);
  for (const auto& t : toks) r.push(t);
  return r.text();
}

std::string render_question(const Lexicon& lx, const std::vector<std::string>& tmpl, const std::string& key) {
  std::vector<std::string> toks;
  for (const auto& t : tmpl) toks.push_back(t == "@" ? key : t);
  return render_tokens(toks, lx.spaced);
}

Source draw_source(const Lexicon& lx, const SyntheticSpec& spec, Rng& rng) {
  auto filler = [&] { return lx.filler[rng.index(lx.filler.size())]; };
  Segment keyed;
  keyed.key = lx.keys[rng.index(lx.keys.size())];
  const std::size_t nb = 1 + rng.index(spec.span_len_max);
  const std::size_t na = 1 + rng.index(spec.span_len_max);
  for (std::size_t k = 0; k < nb; ++k) keyed.before.push_back(filler());
  for (std::size_t k = 0; k < na; ++k) keyed.after.push_back(filler());

  const std::size_t target_len = spec.passage_len_min + rng.index(spec.passage_len_max - spec.passage_len_min + 1);
  std::size_t len = nb + na + 2;
  std::vector<Segment> others;
  // a last gap of one token becomes a bare `;`
  while (len < target_len) {
    const std::size_t room = target_len - len - 1;
    const std::size_t n = std::min(room, 1 + rng.index(2 * spec.span_len_max + 1));
    Segment seg;
    for (std::size_t k = 0; k < n; ++k) seg.before.push_back(filler());
    len += n + 1;
    others.push_back(std::move(seg));
  }
  Source s;
  s.target = rng.index(others.size() + 1);
  for (std::size_t i = 0; i <= others.size(); ++i) {
    if (i == s.target) s.segments.push_back(keyed);
    if (i < others.size()) s.segments.push_back(std::move(others[i]));
  }
  s.dir = rng.index(2) == 0 ? kAfter : kBefore;
  return s;
}

// Renders the passage and returns the record for (source, direction, template).
MrcRecord realize(const Lexicon& lx, const Source& s, Direction dir, const std::vector<std::string>& tmpl,
                  const std::string& id, const std::string& language) {
  Renderer r(lx.spaced);
  std::vector<std::size_t> before_start(s.segments.size()), after_start(s.segments.size());
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& seg = s.segments[i];
    for (std::size_t k = 0; k < seg.before.size(); ++k) {
      const std::size_t at = r.push(seg.before[k]);
      if (k == 0) before_start[i] = at;
    }
    if (!seg.key.empty()) r.push(seg.key);
    for (std::size_t k = 0; k < seg.after.size(); ++k) {
      const std::size_t at = r.push(seg.after[k]);
      if (k == 0) after_start[i] = at;
    }
    r.push(lx.segment_end);
  }
  const auto& seg = s.segments[s.target];
  const auto& span = dir == kAfter ? seg.after : seg.before;
  MrcRecord rec;
  rec.id = id;
  rec.passage = r.text();
  rec.question = render_question(lx, tmpl, seg.key);
  rec.answers.push_back({render_tokens(span, lx.spaced), dir == kAfter ? after_start[s.target] : before_start[s.target]});
  rec.language = language;
  return rec;
}

std::string make_id(const std::string& lang, const std::string& part, std::size_t i) {
  std::string n = std::to_string(i);
  return "syn-" + lang + "-" + part + "-" + std::string(n.size() < 6 ? 6 - n.size() : 0, '0') + n;
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticData out;
  std::vector<Lexicon> lex;
  for (std::size_t i = 0; i < spec.languages.size(); ++i) lex.push_back(make_lexicon(spec.languages[i], i, spec));

  for (std::size_t li = 0; li < spec.languages.size(); ++li) {
    const auto& tag = spec.languages[li];
    std::vector<MrcRecord> recs;
    for (std::size_t i = 0; i < spec.train_counts[li]; ++i) {
      const Source s = draw_source(lex[li], spec, rng);
      recs.push_back(realize(lex[li], s, s.dir, lex[li].primary[s.dir], make_id(tag, "train", i), tag));
    }
    out.train.emplace_back(tag, std::move(recs));
  }

  const Lexicon& main = lex.front();
  const std::string& tag = spec.languages.front();
  const std::size_t n_sources = std::max({spec.test_in_domain, spec.test_paraphrase, spec.test_adversarial});
  for (std::size_t i = 0; i < n_sources; ++i) {
    const Source s = draw_source(main, spec, rng);
    const auto flipped = s.dir == kAfter ? kBefore : kAfter;
    if (i < spec.test_in_domain)
      out.test_in_domain.push_back(realize(main, s, s.dir, main.primary[s.dir], make_id(tag, "test", i), tag));
    if (i < spec.test_paraphrase)
      out.test_paraphrase.push_back(realize(main, s, s.dir, main.paraphrase[s.dir], make_id(tag, "para", i), tag));
    if (i < spec.test_adversarial)
      out.test_adversarial.push_back(realize(main, s, flipped, main.primary[flipped], make_id(tag, "adv", i), tag));
  }

  for (std::size_t i = 0; i < spec.nli_count; ++i) {
    const std::string& key = main.keys[rng.index(main.keys.size())];
    const auto dir = rng.index(2) == 0 ? kAfter : kBefore;
    const auto other = dir == kAfter ? kBefore : kAfter;
    const std::string base = render_question(main, main.primary[dir], key);
    NliRecord rec;
    switch (rng.index(4)) {
      case 0:
      case 1:  // paraphrase pair
        rec = {base, render_question(main, main.paraphrase[dir], key), 1};
        break;
      case 2:  // adversarial pair: one direction token flipped
        rec = {base, render_question(main, main.primary[other], key), 0};
        break;
      default:  // adversarial paraphrase
        rec = {base, render_question(main, main.paraphrase[other], key), 0};
        break;
    }
    if (rng.index(2) == 1) std::swap(rec.s1, rec.s2);
    out.nli.push_back(std::move(rec));
  }
  return out;
}

void write_synthetic(const std::string& dir, const SyntheticData& data) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  for (const auto& [tag, recs] : data.train)
    write_mrc_json((root / ("mrc_train." + tag + ".json")).string(), recs, "train-" + tag);
  write_nli_pairs((root / "nli_train.tsv").string(), data.nli);
  write_mrc_json((root / "mrc_test.in_domain.json").string(), data.test_in_domain, "in_domain");
  write_mrc_json((root / "mrc_test.paraphrase.json").string(), data.test_paraphrase, "paraphrase");
  write_mrc_json((root / "mrc_test.adversarial.json").string(), data.test_adversarial, "adversarial");
}

}  // namespace mrc
