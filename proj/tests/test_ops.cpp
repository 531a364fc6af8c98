#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "strtype/builtins.hpp"
#include "strtype/ops.hpp"
#include "support/gen.hpp"

using namespace strtype;

namespace {

const Registry& reg() { return builtin_registry(); }

SafeStringValue must(std::string_view type, std::string_view raw) {
  auto v = reg().from_raw(type, raw);
  if (!v) FAIL(std::string(type) + " rejected \"" + std::string(raw) + "\"");
  return v.value();
}

}  // namespace

TEST_CASE("blend", "[ops]") {
  auto b = [](const char* x, const char* y) { return cast(*blend(must("CssColour", x), must("CssColour", y))); };
  CHECK(b("#000000", "#000000") == "#000000");
  CHECK(b("#101010", "#202020") == "#303030");
  CHECK(b("#ff0000", "#ff0000") == "#ff0000");
  CHECK(b("#f00", "#0f0") == "#ffff00");
  CHECK_FALSE(blend(must("CssColour", "#000"), must("Email", "a@b.c")).ok());
}

TEST_CASE("blend agrees with a per-channel oracle", "[ops][property]") {
  std::mt19937 rng(gen::kSeed);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 2000; ++i) {
    CssColour a{byte(rng), byte(rng), byte(rng)}, c{byte(rng), byte(rng), byte(rng)};
    CssColour m = blend(a, c);
    CHECK(m.red == (a.red + c.red > 255 ? 255 : a.red + c.red));
    CHECK(m.green == (a.green + c.green > 255 ? 255 : a.green + c.green));
    CHECK(m.blue == (a.blue + c.blue > 255 ? 255 : a.blue + c.blue));
  }
}

TEST_CASE("concat_names and raw_concat", "[ops]") {
  auto a = must("Email", "foo@bar.com");
  auto b = must("Email", "bax@bar.com");
  auto joined = concat_names(a, b);
  REQUIRE(joined.ok());
  CHECK(joined->type_name() == "Email");
  CHECK(cast(*joined) == "foobax@bar.com");
  CHECK(cast(*concat_names(a, must("Email", "x@other.org"))) == "foox@bar.com");

  auto raw = raw_concat(a, b);
  CHECK(raw.type_name() == "string");
  CHECK(cast(raw) == "foo@bar.combax@bar.com");
  CHECK_FALSE(reg().from_raw("Email", cast(raw)).ok());
}

TEST_CASE("append_to_name", "[ops]") {
  auto g = must("Gmail", "foo@gmail.com");
  auto grown = append_to_name(reg(), g, "bar");
  REQUIRE(grown.ok());
  CHECK(grown->type_name() == "Gmail");
  CHECK(cast(*grown) == "foobar@gmail.com");

  auto same = append_to_name(reg(), g, "");
  REQUIRE(same.ok());
  CHECK(strict_eq(*same, g));

  auto bad = append_to_name(reg(), g, "!!");
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.error().kind == ErrorKind::kClosureViolation);
  CHECK_FALSE(append_to_name(reg(), must("CssColour", "#000"), "x").ok());
}

TEST_CASE("append_to_name runs one recogniser", "[ops]") {
  auto counter = std::make_shared<std::atomic<std::size_t>>(0);
  Registry r;
  auto email = email_descriptor();
  auto gmail = gmail_descriptor();
  for (auto& [name, p] : gmail.field_recognisers) p = counted(p, counter);
  REQUIRE(r.register_type(email).ok());
  REQUIRE(r.register_type(gmail).ok());
  auto g = r.from_raw("Gmail", "foo@gmail.com");
  REQUIRE(g.ok());
  counter->store(0);
  REQUIRE(append_to_name(r, *g, "bar").ok());
  CHECK(counter->load() == 1);
  counter->store(0);
  CHECK_FALSE(append_to_name(r, *g, "-").ok());
  CHECK(counter->load() == 1);
}

TEST_CASE("project_field", "[ops]") {
  auto p = project_field(must("Email", "someone@email.com"), "name");
  REQUIRE(p.ok());
  CHECK(*p == Projection{std::string("someone"), "Email", "name"});

  auto f = project_field(must("FilePath", "/a/b/c.txt"), "fileName");
  REQUIRE(f.ok());
  CHECK(std::get<std::string>(f->value) == "c");
  CHECK(f->origin_type == "FilePath");

  CHECK(project_field(must("Email", "a@b.c"), "bogus").error().kind == ErrorKind::kUnknownField);
  CHECK(project_field(must("FilePath", "/a/b"), "ext").error().kind == ErrorKind::kUnknownField);
  CHECK(std::get<std::int64_t>(project_field(must("USPhone", "5552111234"), "area")->value) == 555);
}

TEST_CASE("a projected name is not an email", "[ops][property]") {
  gen::Rng rng(gen::kSeed);
  for (int i = 0; i < 500; ++i) {
    auto name = project_field(must("Email", gen::email(rng)), "name");
    REQUIRE(name.ok());
    CHECK_FALSE(run_to_end(email_parser(), std::string_view(std::get<std::string>(name->value))).ok());
  }
}

TEST_CASE("add_units", "[ops]") {
  CHECK(*add_units(CssUnit::px(10), CssUnit::px(5)) == CssUnit::px(15));
  auto pc = add_units(CssUnit::pc(1), CssUnit::px(16));
  REQUIRE(pc.ok());
  CHECK(pc->unit == LengthUnit::kPc);
  CHECK(pc->value == Catch::Approx(2.0).margin(1e-12));
  CHECK(add_units(CssUnit::automatic(), CssUnit::px(1)).error().kind == ErrorKind::kIncompatibleTypes);
  CHECK(add_units(CssUnit::px(1), CssUnit::automatic()).error().kind == ErrorKind::kIncompatibleTypes);
  auto inch = add_units(CssUnit::cm(0), CssUnit::pt(72));
  CHECK(inch->value == Catch::Approx(2.54).margin(1e-9));

  auto v = add_units(must("PxOrAuto", "10px"), must("CssUnit", "1pc"));
  REQUIRE(v.ok());
  CHECK(cast(*v) == "26px");
  CHECK(v->type_name() == "PxOrAuto");
}

TEST_CASE("add_units commutes after conversion", "[ops][property]") {
  std::mt19937 rng(gen::kSeed);
  std::uniform_real_distribution<double> mag(0.0, 500.0);
  const LengthUnit units[] = {LengthUnit::kPx, LengthUnit::kPt, LengthUnit::kPc, LengthUnit::kCm};
  for (int i = 0; i < 2000; ++i) {
    CssUnit a{units[rng() % 4], mag(rng)}, b{units[rng() % 4], mag(rng)};
    const double ab = *convert(*add_units(a, b), LengthUnit::kCm);
    const double ba = *convert(*add_units(b, a), LengthUnit::kCm);
    CHECK(std::abs(ab - ba) <= 1e-9);
  }
}

TEST_CASE("sub_expressions", "[ops]") {
  auto e = *must("Expr", "3 * 4 + 5").as<Expr>();
  auto subs = sub_expressions(e);
  REQUIRE(subs.size() == 5);
  std::vector<std::string> casts;
  for (const auto& s : subs) casts.push_back(render(StructuredValue{s}).text);
  CHECK(casts == std::vector<std::string>{"3 * 4 + 5", "3 * 4", "3", "4", "5"});
  CHECK(sub_expressions(Expr::constant(7)).size() == 1);
}

TEST_CASE("normalize", "[ops]") {
  CHECK(normalize(must("USPhone", "555.211.1234")) == "555-211-1234");
  CHECK(normalize(must("CssColour", "#ABC")) == "#aabbcc");
  CHECK(normalize(must("FilePath", "/a/b/c.txt")) == "/a/b/c.txt");
}
