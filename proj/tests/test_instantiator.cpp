#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "elt/candidates.hpp"
#include "elt/errors.hpp"
#include "elt/search.hpp"
#include "helpers.hpp"

using namespace elt;
using namespace elt::test;

namespace {

/// Brute-force single-split oracle: the location minimizing the summed
/// two-piece linear SSE, computed with naive loops.
std::int64_t brute_best_split(const std::vector<double>& x) {
  auto sse = [&](std::size_t s, std::size_t e) {
    const std::size_t n = e - s;
    if (n < 2) return 0.0;
    double st = 0, sy = 0, sty = 0, stt = 0;
    for (std::size_t i = s; i < e; ++i) {
      st += static_cast<double>(i);
      sy += x[i];
      sty += static_cast<double>(i) * x[i];
      stt += static_cast<double>(i) * static_cast<double>(i);
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * stt - st * st;
    const double slope = denom == 0 ? 0.0 : (dn * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / dn;
    double out = 0;
    for (std::size_t i = s; i < e; ++i) {
      const double r = x[i] - (intercept + slope * static_cast<double>(i));
      out += r * r;
    }
    return out;
  };
  std::int64_t best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t t = 4; t + 4 <= x.size(); ++t) {
    const double cost = sse(0, t) + sse(t, x.size());
    if (cost < best_cost) {
      best_cost = cost;
      best = static_cast<std::int64_t>(t);
    }
  }
  return best;
}

CandidateSet direct_candidates(std::vector<std::vector<ScoredCandidate>> per_leaf) {
  CandidateSet set;
  set.per_leaf = std::move(per_leaf);
  for (auto& list : set.per_leaf) {
    std::sort(list.begin(), list.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
      if (a.mu != b.mu) return a.mu > b.mu;
      if (a.interval.on != b.interval.on) return a.interval.on < b.interval.on;
      return a.interval.off < b.interval.off;
    });
  }
  return set;
}

SchemaTree random_small_schema(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> op4(0, 3), ch(0, 2), shape(0, 3);
  auto prim = [&] { return P(std::string(1, static_cast<char>('A' + ch(rng)))); };
  SchemaTree tree{"t", prim()};
  const OpKind op = static_cast<OpKind>(op4(rng));
  const OpKind outer_raw = static_cast<OpKind>(op4(rng));
  switch (shape(rng)) {
    case 0: break;  // single primitive
    case 1: tree.root = C(op, {prim(), prim()}); break;
    case 2: tree.root = C(op == OpKind::Guard ? OpKind::Seq : op, {prim(), prim(), prim()}); break;
    default:
      tree.root = C(outer_raw == OpKind::Guard ? OpKind::Sync : outer_raw,
                    {C(op, {prim(), prim()}), prim()});
      break;
  }
  return tree;
}

CandidateSet random_candidates(std::mt19937_64& rng, std::size_t leaves, int max_per_leaf) {
  std::uniform_int_distribution<int> count(1, max_per_leaf);
  std::uniform_int_distribution<std::int64_t> onset(0, 90);
  std::uniform_int_distribution<std::int64_t> len(2, 30);
  std::uniform_real_distribution<double> mu01(0.0, 1.0);
  std::vector<std::vector<ScoredCandidate>> per_leaf(leaves);
  for (auto& list : per_leaf) {
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const std::int64_t on = onset(rng);
      list.push_back({Interval(on, on + len(rng)), mu01(rng)});
    }
  }
  return direct_candidates(std::move(per_leaf));
}

}  // namespace

TEST_CASE("breakpoints recover a planted level shift") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 0.05);
  std::vector<double> x(100);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i < 50 ? 0.0 : 1.0) + gauss(rng);
  const std::int64_t oracle = brute_best_split(x);
  CHECK(std::abs(oracle - 50) <= 2);
  const auto breakpoints = detect_breakpoints(x, 3.0, 24);
  REQUIRE_FALSE(breakpoints.empty());
  bool near = false;
  for (const std::int64_t bp : breakpoints) {
    if (std::abs(bp - 50) <= 2) near = true;
  }
  CHECK(near);
}

TEST_CASE("a noiseless step yields the jump breakpoint and nothing else") {
  std::vector<double> x(120, 2.0);
  for (std::size_t i = 60; i < x.size(); ++i) x[i] = 7.0;
  const auto breakpoints = detect_breakpoints(x, 3.0, 24);
  REQUIRE_FALSE(breakpoints.empty());
  CHECK(breakpoints.size() <= 2);
  bool near = false;
  for (const std::int64_t bp : breakpoints) {
    if (std::abs(bp - 60) <= 2) near = true;
  }
  CHECK(near);
}

TEST_CASE("constant signal yields no breakpoints but the grid fallback fills in") {
  const std::vector<double> flat(128, 3.25);
  CHECK(detect_breakpoints(flat, 3.0, 24).empty());

  std::vector<std::vector<double>> cols{flat};
  const SeriesFrame frame({"A"}, std::move(cols));
  const SchemaTree schema{"e", P("A")};
  const CandidateSet set = generate_candidates(frame, schema, CandidateGenConfig{});
  REQUIRE(set.per_leaf.size() == 1);
  CHECK(set.per_leaf[0].size() >= 4);
  CHECK_FALSE(set.grid_scales.empty());
  for (const auto& cand : set.per_leaf[0]) {
    CHECK(cand.interval.on >= 0);
    CHECK(cand.interval.off <= frame.length());
  }
}

TEST_CASE("candidate lists are mu-sorted and capped") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss;
  std::vector<double> noisy(512);
  for (auto& v : noisy) v = gauss(rng);
  const SeriesFrame frame({"A"}, {noisy});
  CandidateGenConfig config;
  config.max_candidates = 16;
  const SchemaTree schema{"e", P("A", "rise")};
  const CandidateSet set = generate_candidates(frame, schema, config);
  CHECK(set.per_leaf[0].size() <= 16);
  for (std::size_t i = 1; i < set.per_leaf[0].size(); ++i) {
    CHECK(set.per_leaf[0][i - 1].mu >= set.per_leaf[0][i].mu);
  }
}

TEST_CASE("generate_candidates rejects unknown channels") {
  const SeriesFrame frame({"A"}, {std::vector<double>{1, 2, 3, 4}});
  const SchemaTree schema{"e", P("flow")};
  try {
    generate_candidates(frame, schema, CandidateGenConfig{});
    FAIL("expected UnknownChannel");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownChannel);
  }
}

TEST_CASE("exhaustive search: single-leaf argmax") {
  auto schema = make_tree(P("A"));
  const CandidateSet set =
      direct_candidates({{{Interval(0, 10), 0.3}, {Interval(5, 15), 0.9}}});
  const auto result = instantiate_exhaustive(schema, set, OperatorParams::defaults_for(100));
  CHECK(result.root_score == 0.9);
  CHECK(result.best.root.interval == Interval(5, 15));
  CHECK(result.explored == 2);
  CHECK(result.method == SearchMethod::Exhaustive);
}

TEST_CASE("exhaustive search honors gates over raw mu") {
  // best per-leaf pair (0.99, 0.98) is acausal; argmax must respect G_causal
  auto schema = make_tree(C(OpKind::Seq, {P("A"), P("B")}));
  const OperatorParams params = OperatorParams::defaults_for(100);
  const CandidateSet set = direct_candidates({
      {{Interval(40, 50), 0.99}, {Interval(0, 10), 0.80}, {Interval(20, 30), 0.60}},
      {{Interval(35, 45), 0.98}, {Interval(12, 22), 0.70}, {Interval(5, 9), 0.65}},
  });
  // hand enumeration: every causal pair with gap < delta(=5):
  //   [0,10)->[12,22): 0.80*0.70 = 0.56   (gap 2)
  //   all pairs involving [40,50)->... have no later partner; others acausal/gapped
  const auto result = instantiate_exhaustive(schema, set, params);
  CHECK(result.root_score == doctest::Approx(0.56).epsilon(1e-12));
  CHECK(result.best.root.children[0].interval == Interval(0, 10));
  CHECK(result.best.root.children[1].interval == Interval(12, 22));
  CHECK(result.explored == 9);
}

TEST_CASE("exhaustive search enforces its budget") {
  auto schema = make_tree(C(OpKind::Seq, {P("A"), P("B"), P("C")}));
  std::vector<ScoredCandidate> many;
  for (int i = 0; i < 200; ++i) many.push_back({Interval(i, i + 2), 0.5});
  const CandidateSet set = direct_candidates({many, many, many});
  try {
    instantiate_exhaustive(schema, set, OperatorParams::defaults_for(1000), 1000000);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BudgetExceeded);
  }
}

TEST_CASE("beam reports EmptyCandidates with the leaf position") {
  auto schema = make_tree(C(OpKind::Seq, {P("A"), P("B")}));
  const CandidateSet set = direct_candidates({{{Interval(0, 4), 0.5}}, {}});
  try {
    instantiate_beam(schema, set, OperatorParams::defaults_for(100), 8);
    FAIL("expected EmptyCandidates");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyCandidates);
    CHECK(std::string(e.what()).find("#1") != std::string::npos);
  }
}

TEST_CASE("beam equals exhaustive when the width swallows the whole product") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    auto schema = std::make_shared<const SchemaTree>(random_small_schema(rng));
    const CandidateSet set = random_candidates(rng, schema->leaf_count(), 6);
    std::uint64_t product = 1;
    for (const auto& list : set.per_leaf) product *= list.size();
    const OperatorParams params = OperatorParams::defaults_for(120);
    const auto exhaustive = instantiate_exhaustive(schema, set, params);
    const auto beam = instantiate_beam(schema, set, params, static_cast<int>(product));
    CHECK(beam.root_score == exhaustive.root_score);
    CHECK(beam.best.root.interval == exhaustive.best.root.interval);
    CHECK(beam.explored == exhaustive.explored);
  }
}

TEST_CASE("beam(32) stays within 5% of the exhaustive optimum; width-2 solves the SEQ fixture") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    auto schema = std::make_shared<const SchemaTree>(random_small_schema(rng));
    const CandidateSet set = random_candidates(rng, schema->leaf_count(), 8);
    const OperatorParams params = OperatorParams::defaults_for(120);
    const auto exhaustive = instantiate_exhaustive(schema, set, params);
    const auto beam = instantiate_beam(schema, set, params, 32);
    CHECK(beam.root_score >= 0.95 * exhaustive.root_score);
    CHECK(beam.root_score <= exhaustive.root_score + 1e-15);  // search-subset bound
  }

  auto schema = make_tree(C(OpKind::Seq, {P("A"), P("B")}));
  const CandidateSet set = direct_candidates({
      {{Interval(40, 50), 0.99}, {Interval(0, 10), 0.80}, {Interval(20, 30), 0.60}},
      {{Interval(35, 45), 0.98}, {Interval(12, 22), 0.70}, {Interval(5, 9), 0.65}},
  });
  const OperatorParams params = OperatorParams::defaults_for(100);
  const auto narrow = instantiate_beam(schema, set, params, 2);
  const auto exhaustive = instantiate_exhaustive(schema, set, params);
  CHECK(narrow.root_score == exhaustive.root_score);
}

TEST_CASE("wildcard partial scores are admissible upper bounds") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> mu01(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> onset(0, 60);
  std::uniform_int_distribution<std::int64_t> len(2, 30);
  const OperatorParams params = OperatorParams::defaults_for(120);
  for (int trial = 0; trial < 300; ++trial) {
    const SchemaTree schema = random_small_schema(rng);
    const std::size_t leaves = schema.leaf_count();
    std::vector<std::optional<LeafBinding>> partial(leaves);
    for (auto& slot : partial) {
      if (rng() % 2 == 0) {
        const std::int64_t on = onset(rng);
        slot = LeafBinding{Interval(on, on + len(rng)), mu01(rng)};
      }
    }
    const double upper = score_partial(schema.root, partial, params);
    // bind one wildcard; the score must not increase
    for (std::size_t i = 0; i < leaves; ++i) {
      if (!partial[i].has_value()) {
        auto bound = partial;
        const std::int64_t on = onset(rng);
        bound[i] = LeafBinding{Interval(on, on + len(rng)), mu01(rng)};
        CHECK(score_partial(schema.root, bound, params) <= upper + 1e-15);
        break;
      }
    }
  }
}

TEST_CASE("search results are deterministic and self-consistent") {
  std::mt19937_64 rng(59);
  auto schema = std::make_shared<const SchemaTree>(random_small_schema(rng));
  const CandidateSet set = random_candidates(rng, schema->leaf_count(), 8);
  const OperatorParams params = OperatorParams::defaults_for(120);
  const auto first = instantiate_beam(schema, set, params, 16);
  for (int i = 0; i < 5; ++i) {
    const auto again = instantiate_beam(schema, set, params, 16);
    CHECK(again.root_score == first.root_score);
    CHECK(again.best.root.interval == first.best.root.interval);
  }
  // reported root_score matches a fresh propagation of the winning tree
  CHECK(std::abs(propagate(first.best).root_score - first.root_score) <= 1e-12);
}

TEST_CASE("boundary refinement only raises the root score") {
  // a ramp with a fuzzy candidate start: refinement should sharpen toward
  // the true morphology without ever lowering the score
  std::mt19937_64 rng(61);
  std::normal_distribution<double> gauss(0.0, 0.02);
  std::vector<double> x(200, 0.0);
  for (std::size_t i = 80; i < 140; ++i) x[i] = static_cast<double>(i - 80) / 60.0;
  for (std::size_t i = 140; i < 200; ++i) x[i] = 1.0;
  for (auto& v : x) v += gauss(rng);
  const SeriesFrame frame({"A"}, {x});
  auto schema = make_tree(P("A", "rise"));

  const SegmentFeatures feats = compute_features(frame, "A", Interval(70, 150));
  const double mu = score_predicate(PredicateRef{"rise", {}}, feats);
  CandidateSet set = direct_candidates({{{Interval(70, 150), mu}}});
  const OperatorParams params = OperatorParams::defaults_for(200);
  const auto base = instantiate_beam(schema, set, params, 4);
  RefineConfig refine;
  refine.radius_frac = 0.06;
  const auto refined = refine_boundaries(frame, base, params, refine);
  CHECK(refined.root_score >= base.root_score);
  CHECK(std::abs(propagate(refined.best).root_score - refined.root_score) <= 1e-12);
}
