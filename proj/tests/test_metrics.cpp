#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrc/corpus.hpp"
#include "mrc/errors.hpp"
#include "mrc/metrics.hpp"

using namespace mrc;

TEST_CASE("normalisation") {
  CHECK(normalize_answer("The  Quick, Brown fox!") == "quick brown fox");
  CHECK(normalize_answer("an apple a day") == "apple day");
  CHECK(normalize_answer("  ") == "");
  CHECK(normalize_answer("Theory") == "theory");
  CHECK(normalize_answer("北京，中国") == "北京，中国");
  CHECK(answer_tokens("北京 中国") == std::vector<std::string>{"北", "京", "中", "国"});
  // one-character words are symbols: no article or case stripping
  CHECK(answer_tokens("a B c") == std::vector<std::string>{"a", "B", "c"});
  CHECK(normalize_answer("a b c") == "a b c");
  CHECK(normalize_answer("a bc") == "bc");
}

TEST_CASE("exact match fixtures") {
  CHECK(exact_match("Paris", "paris") == 1);
  CHECK(exact_match("the Eiffel Tower.", "Eiffel tower") == 1);
  CHECK(exact_match("Eiffel", "Eiffel Tower") == 0);
  CHECK(exact_match("", "") == 1);
  CHECK(exact_match("", "x") == 0);
  CHECK(exact_match("云南", "云南") == 1);
  CHECK(exact_match("云", "云南") == 0);
  CHECK(exact_match_any("1889", {"in 1889", "1889"}) == 1);
  CHECK(exact_match_any("", {}) == 1);
  CHECK(exact_match_any("x", {}) == 0);
}

TEST_CASE("token F1 fixtures") {
  CHECK(token_f1("Eiffel Tower", "the Eiffel Tower") == 1.0);
  // p = 1/2, r = 1/1
  CHECK(token_f1("Eiffel Paris", "Eiffel") == doctest::Approx(2.0 / 3.0));
  // p = 2/3, r = 2/4
  CHECK(token_f1("red green blue", "red green yellow white") == doctest::Approx(4.0 / 7.0));
  CHECK(token_f1("cat", "dog") == 0.0);
  CHECK(token_f1("b c", "a b c") == 0.8);
  CHECK(exact_match("b c", "a b c") == 0);
  CHECK(exact_match("The Cat", "cat") == 1);
  CHECK(token_f1("", "") == 1.0);
  CHECK(token_f1("", "dog") == 0.0);
  CHECK(token_f1("dog", "") == 0.0);
  // repeated tokens count once per gold occurrence
  CHECK(token_f1("x x x", "x y") == doctest::Approx(2 * (1.0 / 3) * 0.5 / (1.0 / 3 + 0.5)));
  // character level for CJK: 云 shared, p = 1/1, r = 1/2
  CHECK(token_f1("云", "云南") == doctest::Approx(2.0 / 3.0));
  CHECK(token_f1_any("blue", {"red", "blue sky"}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("hand-scored report") {
  // subset a: EM 1,0,1,0,1 ; F1 1, 2/3, 1, 0, 1
  // subset b: EM 0,1,0,0,1 ; F1 2/3, 1, 0, 0.8, 1
  const std::vector<ScoredSample> samples = {
      {"a", "Paris", {"paris"}},
      {"b", "big red", {"red"}},
      {"a", "Eiffel Paris", {"Eiffel"}},
      {"b", "the cat", {"cat"}},
      {"a", "north", {"south", "north"}},
      {"b", "dog", {"cat"}},
      {"a", "x", {"y"}},
      {"b", "a b c d", {"a b c d e f"}},
      {"a", "云南", {"云南"}},
      {"b", "", {}},
  };
  const auto r = score_predictions("fixture", samples);
  REQUIRE(r.subsets.size() == 2);
  CHECK(r.subsets[0].name == "a");
  CHECK(r.subsets[1].name == "b");
  CHECK(r.count == 10);
  CHECK(r.subset("a").count == 5);
  CHECK(r.subset("a").em == doctest::Approx(60.0));
  CHECK(r.subset("a").f1 == doctest::Approx(100.0 * (1 + 2.0 / 3 + 1 + 0 + 1) / 5));
  // "a b c d" vs "a b c d e f": symbols, p = 4/4, r = 4/6
  const double f1_b4 = 0.8;
  CHECK(r.subset("b").em == doctest::Approx(40.0));
  CHECK(r.subset("b").f1 == doctest::Approx(100.0 * (2.0 / 3 + 1 + 0 + f1_b4 + 1) / 5));
  CHECK(r.em == doctest::Approx(50.0));
  CHECK(r.f1 == doctest::Approx((r.subset("a").f1 + r.subset("b").f1) / 2));
  CHECK_THROWS_AS(r.subset("c"), UsageError);

  const std::string kv = r.to_kv();
  CHECK(kv.find("dataset=fixture\n") == 0);
  CHECK(kv.find("all.em=50\n") != std::string::npos);
  CHECK(kv.find("a.count=5\n") != std::string::npos);
  CHECK(r.to_text().find("a: EM 60.00") != std::string::npos);
}

TEST_CASE("evaluation with oracle, empty and constant predictors") {
  SyntheticSpec spec;
  spec.train_counts = {16, 8};
  spec.nli_count = 4;
  spec.test_in_domain = spec.test_paraphrase = spec.test_adversarial = 12;
  const Corpus corpus = build_corpus(gen_synthetic(spec), 64);

  const Predictor oracle = [](const MrcExample& ex) { return span_text(ex, ex.start_token, ex.end_token); };
  const auto full = evaluate_with("syn", oracle, corpus.tests, 1);
  CHECK(full.em == 100.0);
  CHECK(full.f1 == 100.0);
  CHECK(full.count == 36);
  CHECK(full.subsets.size() == 3);

  const auto none = evaluate_with("syn", [](const MrcExample&) { return std::string(); }, corpus.tests, 1);
  CHECK(none.em == 0.0);
  CHECK(none.f1 == 0.0);

  // predicting the whole passage: EM 0, F1 strictly between 0 and 100
  const Predictor whole = [](const MrcExample& ex) { return ex.passage; };
  const auto w1 = evaluate_with("syn", whole, corpus.tests, 1);
  const auto w3 = evaluate_with("syn", whole, corpus.tests, 3);
  CHECK(w1.em == 0.0);
  CHECK(w1.f1 > 0.0);
  CHECK(w1.f1 < 100.0);
  CHECK(w1.to_kv() == w3.to_kv());
}

TEST_CASE("model evaluation and vocabulary checks") {
  Config cfg = desk_preset();
  cfg.model.d_model = 16;
  cfg.model.n_blocks = 1;
  cfg.model.encoder_blocks = 1;
  cfg.model.d_ff = 16;
  SyntheticSpec spec;
  spec.train_counts = {8, 4};
  spec.nli_count = 4;
  spec.test_in_domain = spec.test_paraphrase = spec.test_adversarial = 6;
  const Corpus corpus = build_corpus(gen_synthetic(spec), cfg.model.max_seq_len);
  cfg.model.vocab_size = corpus.vocab.size();
  const auto params = init_params<float>(cfg.model, 5);
  const auto one = evaluate<float>("syn", {&params}, cfg.model, corpus.tests, 8, 1);
  const auto two = evaluate<float>("syn", {&params, &params}, cfg.model, corpus.tests, 8, 2);
  CHECK(one.count == 18);
  CHECK(one.to_kv() == two.to_kv());

  check_vocab(params, cfg.model);
  ModelConfig other = cfg.model;
  other.vocab_size += 1;
  CHECK_THROWS_AS(check_vocab(params, other), DataError);
  CHECK_THROWS_AS(evaluate<float>("syn", {}, cfg.model, corpus.tests, 8, 1), UsageError);
}

TEST_CASE("ablation variants") {
  Config cfg = desk_preset();
  CHECK(variant_config(cfg, AblationVariant::no_nli).train.alpha == 0.0);
  CHECK(variant_config(cfg, AblationVariant::full).train.alpha == cfg.train.alpha);
  CHECK(variant_config(cfg, AblationVariant::standard_attention).model.attention == AttentionMode::standard);
  CHECK(variant_config(cfg, AblationVariant::single_language).model.attention == AttentionMode::memory);
  CHECK(std::string(variant_name(AblationVariant::single_language)) == "single_language");

  SyntheticSpec spec;
  spec.train_counts = {8, 4};
  spec.nli_count = 4;
  const Corpus corpus = build_corpus(gen_synthetic(spec), 64);
  const auto single = variant_data(corpus.train, AblationVariant::single_language);
  REQUIRE(single.mrc.size() == 1);
  CHECK(single.mrc.begin()->first == "en");
  CHECK(single.nli.size() == 4);
  CHECK(variant_data(corpus.train, AblationVariant::full).mrc.size() == 2);
}
