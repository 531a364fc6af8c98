#include <catch_amalgamated.hpp>

#include <atomic>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "strtype/parser.hpp"

using namespace strtype;

namespace {

std::vector<std::u32string> all_ab_strings(std::size_t max_len) {
  std::vector<std::u32string> out{U""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      out.push_back(out[i] + U'a');
      out.push_back(out[i] + U'b');
    }
    begin = end;
  }
  return out;
}

// A handful of parsers with different consumption behaviour.
std::vector<Parser<std::string>> sample_parsers() {
  return {
      literal("a"),
      literal("ab"),
      matched(many(char_(U'a'))),
      matched(some(char_(U'b'))),
      pattern_token("a*b"),
      succeed(std::string("x")),
      fail<std::string>("nothing"),
      alt(literal("ab"), literal("a")),
  };
}

}  // namespace

TEST_CASE("primitives", "[kernel]") {
  auto r = char_(U'a').parse(U"abc");
  REQUIRE(r.ok());
  CHECK(r.value() == U'a');
  CHECK(r.next() == 1);

  auto f = char_(U'x').parse(U"abc");
  REQUIRE_FALSE(f.ok());
  CHECK(f.failure().pos == 0);
  CHECK(f.failure().expected == "'x'");

  CHECK_FALSE(any_char().parse(U"").ok());
  CHECK(digit().parse(U"7").ok());
  CHECK(digit().parse(U"x").failure().expected == "digit");
  CHECK(one_of("xyz").parse(U"y").value() == U'y');
  CHECK_THROWS_AS(one_of(""), std::invalid_argument);

  auto lit = literal("gmail").parse(U"gmaxl");
  REQUIRE_FALSE(lit.ok());
  CHECK(lit.failure().pos == 0);
  CHECK(lit.failure().expected == "\"gmail\"");

  CHECK(eof().parse(U"").ok());
  CHECK_FALSE(eof().parse(U"a").ok());
}

TEST_CASE("pattern_token is longest match anchored at the position", "[kernel]") {
  auto p = pattern_token("[0-9]+(\\.[0-9]+)?");
  auto r = p.parse(U"x12.5px", 1);
  REQUIRE(r.ok());
  CHECK(r.value() == "12.5");
  CHECK(r.next() == 5);
  CHECK(p.parse(U"12.px").value() == "12");
  CHECK(p.parse(U"px").failure().pos == 0);
}

TEST_CASE("sequencing", "[kernel]") {
  auto ab = then(char_(U'a'), char_(U'b'));
  CHECK(ab.parse(U"ab").value() == std::pair{U'a', U'b'});
  CHECK(ab.parse(U"ax").failure().pos == 1);
  CHECK(skip_left(char_(U'('), char_(U'x')).parse(U"(x").value() == U'x');
  CHECK(skip_right(char_(U'x'), char_(U')')).parse(U"x)").next() == 2);
  auto t = seq(digit(), char_(U'-'), digit()).parse(U"1-2");
  REQUIRE(t.ok());
  CHECK(std::get<2>(t.value()) == U'2');
}

TEST_CASE("functor identity and composition", "[laws]") {
  auto id = [](const std::string& s) { return s; };
  auto f = [](const std::string& s) { return s.size(); };
  auto g = [](std::size_t n) { return n * 2 + 1; };
  for (const auto& p : sample_parsers()) {
    for (const auto& s : all_ab_strings(4)) {
      CHECK(map(p, id).parse(s) == p.parse(s));
      CHECK(map(map(p, f), g).parse(s) == map(p, [&](const std::string& x) { return g(f(x)); }).parse(s));
    }
  }
}

TEST_CASE("monad identities and associativity", "[laws]") {
  auto k = [](const std::string& s) { return s.size() % 2 == 0 ? literal("a") : literal("b"); };
  auto h = [](const std::string& s) { return map(many(char_(U'b')), [s](const auto& v) { return s + std::to_string(v.size()); }); };
  for (const auto& s : all_ab_strings(5)) {
    for (const std::string x : {"", "a", "ab"}) {
      // left identity
      CHECK(strtype::bind(succeed(x), k).parse(s) == k(x).parse(s));
    }
    for (const auto& p : sample_parsers()) {
      // right identity
      CHECK(strtype::bind(p, [](const std::string& v) { return succeed(v); }).parse(s) == p.parse(s));
      // associativity
      auto lhs = strtype::bind(strtype::bind(p, k), h);
      auto rhs = strtype::bind(p, [&](const std::string& v) { return strtype::bind(k(v), h); });
      CHECK(lhs.parse(s) == rhs.parse(s));
    }
  }
}

TEST_CASE("alt restarts the second branch at the original position", "[laws]") {
  // The first branch consumes "ab" before failing on 'c'.
  auto p = alt(matched(seq(char_(U'a'), char_(U'b'), char_(U'c'))), literal("abd"));
  auto r = p.parse(U"abd");
  REQUIRE(r.ok());
  CHECK(r.value() == "abd");
  CHECK(r.next() == 3);

  for (const auto& s : all_ab_strings(6)) {
    for (const auto& q : sample_parsers()) {
      for (std::size_t pos = 0; pos <= s.size(); ++pos) {
        auto joined = alt(fail<std::string>("never"), q).parse(s, pos);
        auto alone = q.parse(s, pos);
        CHECK(joined.ok() == alone.ok());
        if (alone.ok()) CHECK(joined == alone);
      }
    }
  }
}

TEST_CASE("alt reports the failure that got furthest", "[kernel]") {
  auto p = alt(matched(seq(char_(U'a'), char_(U'b'))), matched(char_(U'x')));
  auto r = p.parse(U"ac");
  REQUIRE_FALSE(r.ok());
  CHECK(r.failure().pos == 1);
  CHECK(r.failure().expected == "'b'");

  auto tie = alt(char_(U'x'), char_(U'y')).parse(U"z");
  CHECK(tie.failure().expected == "'x' or 'y'");
}

TEST_CASE("many and some agree over {a,b} strings up to length 8", "[laws]") {
  const auto inputs = all_ab_strings(8);
  REQUIRE(inputs.size() == 511);
  auto a = char_(U'a');
  auto some_via_many = map(then(a, many(a)), [](const auto& pr) {
    std::vector<char32_t> v{pr.first};
    v.insert(v.end(), pr.second.begin(), pr.second.end());
    return v;
  });
  for (const auto& s : inputs) {
    std::size_t run = 0;
    while (run < s.size() && s[run] == U'a') ++run;

    auto m = many(a).parse(s);
    REQUIRE(m.ok());
    CHECK(m.value().size() == run);
    CHECK(m.next() == run);

    auto so = some(a).parse(s);
    CHECK(so.ok() == (run > 0));
    CHECK(so == some_via_many.parse(s));
    // many p = some p <|> pure []
    CHECK(m == alt(some(a), succeed(std::vector<char32_t>{})).parse(s));
  }
}

TEST_CASE("repetition that consumes nothing is an error", "[laws]") {
  CHECK_THROWS_AS(many(succeed(1)).parse(U"abc"), NontermError);
  CHECK_THROWS_AS(some(succeed(1)).parse(U""), NontermError);
  CHECK_THROWS_AS(many(many(char_(U'a'))).parse(U"b"), NontermError);
  try {
    many(succeed(1).desc("nothing")).parse(U"x", 0);
    FAIL("expected NontermError");
  } catch (const NontermError& e) {
    CHECK(e.pos() == 0);
  }
}

TEST_CASE("repeat_exact", "[kernel]") {
  CHECK(repeat_exact(char_(U'b'), 0).parse(U"bbb").next() == 0);
  CHECK(repeat_exact(char_(U'b'), 3).parse(U"bbbb").next() == 3);
  CHECK(repeat_exact(char_(U'b'), 3).parse(U"bbx").failure().pos == 2);
}

TEST_CASE("fallback only applies when nothing matched", "[kernel]") {
  auto sep = matched(one_of(" -")).fallback("");
  CHECK(sep.parse(U"-x").value() == "-");
  auto r = sep.parse(U"x");
  CHECK(r.value().empty());
  CHECK(r.next() == 0);
}

TEST_CASE("chain_left folds to the left and commits after an operator", "[kernel]") {
  auto num = map(digit(), [](char32_t c) { return static_cast<int>(c - U'0'); });
  auto minus = map(char_(U'-'), [](char32_t) { return [](int a, int b) { return a - b; }; });
  auto p = chain_left(num, minus);
  CHECK(p.parse(U"9-3-2").value() == 4);
  CHECK(p.parse(U"7").value() == 7);
  auto dangling = p.parse(U"9-");
  REQUIRE_FALSE(dangling.ok());
  CHECK(dangling.failure().pos == 2);
  CHECK(dangling.failure().expected == "digit");
}

TEST_CASE("desc relabels at the start position", "[kernel]") {
  auto p = desc(matched(seq(digit(), digit(), digit())), "a valid area code");
  auto r = p.parse(U"x12", 1);
  REQUIRE_FALSE(r.ok());
  CHECK(r.failure().pos == 1);
  CHECK(r.failure().expected == "a valid area code");
  CHECK(p.label() == "a valid area code");
  CHECK_THROWS(desc(digit(), ""));
}

TEST_CASE("lazy allows recursive grammars", "[kernel]") {
  // nested = '(' nested ')' | ""
  static Parser<int> nested = alt(
      map(seq(char_(U'('), lazy([] { return nested; }), char_(U')')),
          [](const auto& t) { return std::get<1>(t) + 1; }),
      succeed(0));
  CHECK(nested.parse(U"((()))").value() == 3);
  // The unclosed outer paren makes the recursive branch fail, so the empty
  // branch wins and the leftover input is reported.
  auto open = run_to_end(nested, std::u32string_view(U"(()"));
  REQUIRE_FALSE(open.ok());
  CHECK(open.failure().pos == 0);
  CHECK(open.failure().expected == "end of input");
}

TEST_CASE("spanned, matched and counted", "[kernel]") {
  auto p = spanned(matched(some(digit())));
  auto r = p.parse(U"ab123c", 2);
  REQUIRE(r.ok());
  CHECK(r.value().value == "123");
  CHECK(r.value().span == Span{2, 5});

  auto counter = std::make_shared<std::atomic<std::size_t>>(0);
  auto c = counted(digit(), counter);
  (void)many(c).parse(U"12a");
  CHECK(counter->load() == 3);
}

TEST_CASE("run_to_end demands the whole input", "[kernel]") {
  auto r = run_to_end(literal("ab"), std::string_view("abc"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.failure().pos == 2);
  CHECK(r.failure().expected == "end of input");
  CHECK(run_to_end(literal("ab"), std::string_view("ab")).ok());
}

TEST_CASE("positions count codepoints", "[kernel]") {
  auto p = then(matched(many(satisfy([](char32_t c) { return c != U'@'; }, "non-@"))), char_(U'@'));
  auto r = run_to_end(p, std::string_view("h\xc3\xa9llo@x"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.failure().pos == 6);
}

namespace {

// Random parsers over {a,b,c,d}, built from the combinators themselves.
Parser<std::string> random_parser(std::mt19937& rng, int depth) {
  const std::string alphabet = "abcd";
  auto letter = [&] { return std::string(1, alphabet[rng() % 4]); };
  const int pick = depth == 0 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 8);
  switch (pick) {
    case 0:
      return literal(letter());
    case 1:
      return literal(letter() + letter());
    case 2:
      return matched(one_of(letter() + letter()));
    case 3:
      return map(then(random_parser(rng, depth - 1), random_parser(rng, depth - 1)),
                 [](const auto& pr) { return pr.first + pr.second; });
    case 4:
      return alt(random_parser(rng, depth - 1), random_parser(rng, depth - 1));
    case 5:
      return matched(many(literal(letter())));
    case 6:
      return random_parser(rng, depth - 1).fallback("-");
    default:
      return desc(random_parser(rng, depth - 1), "thing");
  }
}

std::u32string random_input(std::mt19937& rng) {
  std::u32string s;
  const std::size_t n = rng() % 7;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<char32_t>(U'a' + rng() % 4);
  return s;
}

}  // namespace

TEST_CASE("laws hold for random parsers over four symbols", "[laws][property]") {
  std::mt19937 rng(424242);
  auto f = [](const std::string& s) { return s + "!"; };
  auto g = [](const std::string& s) { return s.size(); };
  auto k = [](const std::string& s) { return s.empty() ? literal("a") : matched(many(literal(s.substr(0, 1)))); };
  for (int i = 0; i < 300; ++i) {
    auto p = random_parser(rng, 3);
    for (int j = 0; j < 20; ++j) {
      const auto s = random_input(rng);
      const std::size_t pos = rng() % (s.size() + 1);
      auto r = p.parse(s, pos);
      CHECK(r == p.parse(s, pos));
      if (r.ok()) CHECK(r.next() <= s.size());
      CHECK(alt(p, p).parse(s, pos).ok() == r.ok());
      if (r.ok()) CHECK(alt(p, p).parse(s, pos) == r);
      CHECK(map(p, [](const std::string& x) { return x; }).parse(s, pos) == r);
      CHECK(map(map(p, f), g).parse(s, pos) == map(p, [&](const std::string& x) { return g(f(x)); }).parse(s, pos));
      CHECK(strtype::bind(p, [](const std::string& x) { return succeed(x); }).parse(s, pos) == r);
      CHECK(strtype::bind(succeed(std::string("b")), k).parse(s, pos) == k("b").parse(s, pos));
      // desc never changes what is accepted.
      auto d = desc(p, "label").parse(s, pos);
      CHECK(d.ok() == r.ok());
      if (r.ok()) CHECK(d == r);
    }
  }
}

TEST_CASE("many takes the most repetitions", "[laws]") {
  // Oracle: count leading "ab" pairs by hand.
  std::mt19937 rng(5);
  auto p = many(literal("ab"));
  for (int i = 0; i < 500; ++i) {
    std::u32string s;
    const std::size_t n = rng() % 10;
    for (std::size_t j = 0; j < n; ++j) s += (rng() % 3) ? (j % 2 ? U'b' : U'a') : U'c';
    std::size_t reps = 0;
    while (2 * reps + 1 < s.size() + 0 && s[2 * reps] == U'a' && s[2 * reps + 1] == U'b') ++reps;
    auto r = p.parse(s);
    REQUIRE(r.ok());
    CHECK(r.value().size() == reps);
    CHECK(r.next() == 2 * reps);
  }
}

TEST_CASE("examples from the kernel contract", "[kernel]") {
  CHECK(succeed(7).parse(U"abc") == Outcome<int>(Success<int>{7, 0}));
  CHECK(pattern_token("[2-9][0-9]{2}").parse(U"555-").value() == "555");
  CHECK(pattern_token("[2-9][0-9]{2}").parse(U"155").failure().pos == 0);
  CHECK(alt(literal("aa"), literal("ab")).parse(U"ab").next() == 2);
  auto spaces = some(one_of(" \t"));
  CHECK(spaces.parse(U"  x").next() == 2);
  CHECK(many(digit()).parse(U"abc").next() == 0);
  CHECK(some(digit()).parse(U"abc").failure().expected == "digit");
  CHECK(map(pattern_token("[0-9]{4}"), [](const std::string& s) { return std::stoi(s); }).parse(U"1234").value() == 1234);
  CHECK(matched(one_of(" ./-")).fallback("").parse(U"5") == Outcome<std::string>(Success<std::string>{"", 0}));
  CHECK(then(literal("a"), literal("b")).parse(U"ac").failure().pos == 1);
  CHECK(desc(desc(digit(), "inner"), "outer").parse(U"x").failure().expected == "outer");
  auto trailing = run_to_end(digit(), std::string_view("1x"));
  CHECK(trailing.failure() == Failure{1, "end of input"});
}
