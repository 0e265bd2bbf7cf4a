#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "elt/errors.hpp"
#include "elt/interval.hpp"
#include "elt/series.hpp"

using namespace elt;

namespace {

// brute-force oracles over explicit sample indices
std::int64_t brute_intersection(const Interval& a, const Interval& b) {
  std::int64_t count = 0;
  for (std::int64_t t = std::min(a.on, b.on); t < std::max(a.off, b.off); ++t) {
    if (a.contains(t) && b.contains(t)) ++count;
  }
  return count;
}

double brute_iou(const Interval& a, const Interval& b) {
  std::int64_t inter = 0;
  std::int64_t uni = 0;
  for (std::int64_t t = std::min(a.on, b.on); t < std::max(a.off, b.off); ++t) {
    const bool in_a = a.contains(t);
    const bool in_b = b.contains(t);
    if (in_a && in_b) ++inter;
    if (in_a || in_b) ++uni;
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Interval random_interval(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> onset(0, 60);
  std::uniform_int_distribution<std::int64_t> len(1, 40);
  const std::int64_t on = onset(rng);
  return Interval(on, on + len(rng));
}

}  // namespace

TEST_CASE("interval construction enforces nonemptiness") {
  CHECK_THROWS_AS(Interval(5, 5), Error);
  CHECK_THROWS_AS(Interval(5, 4), Error);
  CHECK_THROWS_AS(Interval(-1, 4), Error);
  const Interval ok(3, 9);
  CHECK(ok.length() == 6);
}

TEST_CASE("intersection length matches brute force") {
  CHECK(intersection_length(Interval(0, 10), Interval(0, 10)) == 10);
  CHECK(intersection_length(Interval(0, 10), Interval(20, 30)) == 0);
  CHECK(intersection_length(Interval(0, 10), Interval(5, 15)) ==
        brute_intersection(Interval(0, 10), Interval(5, 15)));
  CHECK(intersection_length(Interval(0, 10), Interval(5, 15)) == 5);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const std::int64_t got = intersection_length(a, b);
    CHECK(got == brute_intersection(a, b));
    CHECK(got <= std::min(a.length(), b.length()));
  }
}

TEST_CASE("iou matches brute force and its laws") {
  CHECK(iou(Interval(0, 10), Interval(0, 10)) == 1.0);
  CHECK(iou(Interval(0, 10), Interval(20, 30)) == 0.0);
  CHECK(iou(Interval(0, 10), Interval(5, 15)) == doctest::Approx(5.0 / 15.0).epsilon(1e-12));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const double ab = iou(a, b);
    CHECK(ab == doctest::Approx(brute_iou(a, b)).epsilon(1e-12));
    CHECK(ab == iou(b, a));  // symmetry
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK((ab == 1.0) == (a == b));
    CHECK((ab == 0.0) == (intersection_length(a, b) == 0));
  }
}

TEST_CASE("load_csv ingests selected columns in file order") {
  const std::string text =
      "t,pressure,volume\n"
      "0,1.5,10\n"
      "1,2.5,11\n"
      "2,3.5,12\n";
  const SeriesFrame frame = load_csv_text(text, {"pressure", "volume"});
  CHECK(frame.length() == 3);
  CHECK(frame.channel_count() == 2);
  CHECK(frame.channel("pressure")[0] == 1.5);
  CHECK(frame.channel("volume")[2] == 12.0);
}

TEST_CASE("load_csv rejects missing columns") {
  const std::string text = "t,pressure\n0,1\n1,2\n";
  try {
    load_csv_text(text, {"pressure", "volume"});
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingColumn);
  }
}

TEST_CASE("load_csv rejects non-numeric cells with position") {
  std::string text = "t,pressure\n";
  for (int row = 0; row < 8; ++row) {
    text += std::to_string(row) + "," + (row == 5 ? std::string("NaN") : std::to_string(row)) + "\n";
  }
  try {
    load_csv_text(text, {"pressure"});
    FAIL("expected NonNumericCell");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonNumericCell);
    CHECK(std::string(e.what()).find("row 5") != std::string::npos);
    CHECK(std::string(e.what()).find("pressure") != std::string::npos);
  }
}

TEST_CASE("load_csv rejects too-short series") {
  try {
    load_csv_text("t,p\n0,1\n", {"p"});
    FAIL("expected TooShort");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooShort);
  }
}

TEST_CASE("load_csv honors a configured delimiter") {
  CsvOptions options;
  options.delimiter = ';';
  const SeriesFrame frame = load_csv_text("p;q\n1;2\n3;4\n", {"q"}, options);
  CHECK(frame.channel("q")[1] == 4.0);
}

TEST_CASE("slice keeps channels and validates bounds") {
  const SeriesFrame frame = load_csv_text("t,p\n0,1\n1,2\n2,3\n3,4\n", {"p"});
  const SeriesFrame sub = frame.slice(Interval(1, 3));
  CHECK(sub.length() == 2);
  CHECK(sub.channel("p")[0] == 2.0);
  CHECK_THROWS_AS(frame.slice(Interval(2, 9)), Error);
}
