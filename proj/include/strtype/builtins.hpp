#pragma once

// The builtin catalogue: CSS colours and lengths, email addresses (and the
// Gmail specialisation), file paths, US phone numbers, balanced a^n b^n
// strings, inner-r strings, arithmetic expressions, and allowlisted text.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "strtype/parser.hpp"
#include "strtype/safestring.hpp"
#include "strtype/structures.hpp"

namespace strtype {

namespace builtin_detail {

inline int hex_value(const std::string& digits) { return static_cast<int>(std::strtol(digits.c_str(), nullptr, 16)); }

inline int decimal_value(const std::string& digits) { return static_cast<int>(std::strtol(digits.c_str(), nullptr, 10)); }

inline bool is_separator(char32_t c) { return c == U'/' || c == U'\\'; }

// Allowed characters for user-facing free text: letters, digits, space,
// underscore, dot and single dashes.
inline constexpr std::string_view kAllowlist = "-?([0-9a-zA-Z _.]-?)+";

}  // namespace builtin_detail

// ---------------------------------------------------------------- CssColour

/// '#' followed by three or six hex digits, in either case. Short digits are
/// doubled (#abc is #aabbcc).
inline Parser<Parsed> css_colour_parser() {
  auto component = [](int width) {
    const std::string pattern = width == 2 ? "[0-9a-fA-F]{2}" : "[0-9a-fA-F]";
    return spanned(map(pattern_token(pattern), [width](const std::string& d) {
      const int v = builtin_detail::hex_value(d);
      return width == 2 ? v : v * 17;
    }));
  };
  auto rgb = [&](int width) {
    auto parse_red = component(width);
    auto parse_green = component(width);
    auto parse_blue = component(width);
    return parse_red.then(parse_green.then(parse_blue));
  };
  auto parse_hash = char_(U'#');
  auto css_colour = parse_hash.then(alt(rgb(2), rgb(1)));
  return map(css_colour, [](const auto& parsed) {
    const auto& [red, rest] = parsed.second;
    const auto& [green, blue] = rest;
    Parsed out{StructuredValue{CssColour{red.value, green.value, blue.value}}, {}};
    out.spans["red"] = red.span;
    out.spans["green"] = green.span;
    out.spans["blue"] = blue.span;
    return out;
  });
}

inline std::string css_colour_cast(const CssColour& c) { return render(StructuredValue{c}).text; }

inline SafeStringDescriptor css_colour_descriptor() {
  auto hex = pattern_token("[0-9a-fA-F]{1,2}");
  return SafeStringDescriptor{"CssColour",
                              css_colour_parser(),
                              std::nullopt,
                              {},
                              {{"red", hex}, {"green", hex}, {"blue", hex}},
                              {"red", "green", "blue"}};
}

// ------------------------------------------------------------------ CssUnit

inline constexpr std::string_view kNumberPattern = "[0-9]+(\\.[0-9]+)?";

inline Parser<Parsed> css_unit_parser() {
  auto automatic = map(spanned(literal("auto")), [](const Spanned<std::string>& s) {
    Parsed p{StructuredValue{CssUnit::automatic()}, {}};
    p.spans["unit"] = s.span;
    return p;
  });
  auto number = strtype::bind(spanned(pattern_token(kNumberPattern)), [](const Spanned<std::string>& s) {
    const double v = std::strtod(s.value.c_str(), nullptr);
    if (!std::isfinite(v)) return fail<Spanned<double>>("a finite number");
    return succeed(Spanned<double>{v, s.span});
  });
  auto unit = choice(map(literal("px"), [](const std::string&) { return LengthUnit::kPx; }),
                     map(literal("pt"), [](const std::string&) { return LengthUnit::kPt; }),
                     map(literal("pc"), [](const std::string&) { return LengthUnit::kPc; }),
                     map(literal("cm"), [](const std::string&) { return LengthUnit::kCm; }));
  auto measured = map(number.then(spanned(desc(unit, "a unit (px, pt, pc or cm)"))), [](const auto& nu) {
    Parsed p{StructuredValue{CssUnit{nu.second.value, nu.first.value}}, {}};
    p.spans["value"] = nu.first.span;
    p.spans["unit"] = nu.second.span;
    return p;
  });
  return alt(automatic, measured);
}

inline SafeStringDescriptor css_unit_descriptor() {
  return SafeStringDescriptor{"CssUnit",
                              css_unit_parser(),
                              std::nullopt,
                              {},
                              {{"value", pattern_token(kNumberPattern)}, {"unit", pattern_token("px|pt|pc|cm|auto")}},
                              {"value", "unit"}};
}

/// A length slot that admits only pixels or auto.
inline SafeStringDescriptor px_or_auto_descriptor() {
  return derive_subtype(css_unit_descriptor(), "PxOrAuto", {{"unit", alt(literal("px"), literal("auto"))}});
}

// -------------------------------------------------------------------- Email

inline constexpr std::string_view kNamePattern = "[0-9a-zA-Z]+";
inline constexpr std::string_view kLeftPattern = "[0-9-a-zA-Z-]+";
inline constexpr std::string_view kRightPattern = "[0-9-a-zA-Z-.]+";

/// name '@' left '.' right, with a replaceable recogniser for `left`.
inline Parser<Parsed> email_parser(const Parser<std::string>& left_recogniser) {
  auto name = spanned(desc(pattern_token(kNamePattern), "name /[0-9a-zA-Z]+/"));
  auto at = desc(char_(U'@'), "'@'");
  auto left = spanned(left_recogniser);
  auto dot = desc(char_(U'.'), "'.'");
  auto right = spanned(desc(pattern_token(kRightPattern), "domainRight /[0-9a-zA-Z.-]+/"));
  return map(seq(name, at, left, dot, right), [](const auto& t) {
    const auto& [n, a, l, d, r] = t;
    Parsed p{StructuredValue{Email{n.value, l.value, r.value}}, {}};
    p.spans["name"] = n.span;
    p.spans["domainLeft"] = l.span;
    p.spans["domainRight"] = r.span;
    return p;
  });
}

inline Parser<Parsed> email_parser() {
  return email_parser(desc(pattern_token(kLeftPattern), "domainLeft /[0-9a-zA-Z-]+/"));
}

inline Parser<Parsed> gmail_parser() { return email_parser(desc(literal("gmail"), "domainLeft \"gmail\"")); }

inline SafeStringDescriptor email_descriptor() {
  return SafeStringDescriptor{"Email",
                              email_parser(),
                              std::nullopt,
                              {},
                              {{"name", pattern_token(kNamePattern)},
                               {"domainLeft", pattern_token(kLeftPattern)},
                               {"domainRight", pattern_token(kRightPattern)}},
                              {"name", "domainLeft", "domainRight"}};
}

/// Email with the domain's left label fixed to "gmail".
inline SafeStringDescriptor gmail_descriptor() {
  SafeStringDescriptor d = email_descriptor();
  d.type_name = "Gmail";
  d.recogniser = gmail_parser();
  d.parent = "Email";
  d.overridden_fields = {"domainLeft"};
  d.field_recognisers.insert_or_assign("domainLeft", literal("gmail"));
  return d;
}

// ----------------------------------------------------------------- FilePath

namespace builtin_detail {

struct PathPieces {
  bool absolute = false;
  std::optional<Spanned<char32_t>> first_separator;
  std::vector<Spanned<std::string>> segments;
};

inline Parser<Spanned<std::string>> path_segment() {
  return spanned(matched(some(satisfy([](char32_t c) { return !is_separator(c); }, "a path segment"))));
}

// Segments after the separator style is fixed: each further `sep` must be
// followed by a segment, and the other separator is rejected outright.
inline Parser<std::vector<Spanned<std::string>>> segments_using(char32_t sep) {
  auto segment = path_segment();
  const std::string fixed = std::string("separator '") + (sep == U'/' ? "/" : "\\") + "' (fixed by first use)";
  return Parser<std::vector<Spanned<std::string>>>(
      [segment, sep, fixed](Input in) -> Outcome<std::vector<Spanned<std::string>>> {
        std::vector<Spanned<std::string>> out;
        std::size_t pos = in.pos;
        while (pos < in.text.size() && is_separator(in.text[pos])) {
          if (in.text[pos] != sep) return Failure{pos, fixed};
          auto seg = segment(in.at(pos + 1));
          if (!seg) return seg.failure();
          pos = seg.next();
          out.push_back(std::move(seg).value());
        }
        return Success<std::vector<Spanned<std::string>>>{std::move(out), pos};
      });
}

inline Parser<PathPieces> path_pieces(std::optional<char32_t> pinned) {
  auto separator = spanned(pinned ? char_(*pinned) : desc(one_of("/\\"), "a separator"));
  auto segment = path_segment();
  // The first separator seen fixes the style for the rest of the string.
  auto after_first_separator = [segment](bool absolute, std::vector<Spanned<std::string>> lead) {
    return [segment, absolute, lead](const Spanned<char32_t>& sep) {
      return map(segment.then(segments_using(sep.value)), [absolute, lead, sep](const auto& parsed) {
        PathPieces p{absolute, sep, lead};
        p.segments.push_back(parsed.first);
        p.segments.insert(p.segments.end(), parsed.second.begin(), parsed.second.end());
        return p;
      });
    };
  };
  auto absolute = strtype::bind(separator, after_first_separator(true, {}));
  auto relative = strtype::bind(segment, [separator, after_first_separator](const Spanned<std::string>& first) {
    auto more = strtype::bind(separator, after_first_separator(false, {first}));
    auto alone = succeed(PathPieces{false, std::nullopt, {first}});
    // Commit to `more` once a separator is in sight.
    return Parser<PathPieces>([more, alone](Input in) -> Outcome<PathPieces> {
      if (!in.at_end() && is_separator(in.peek())) return more(in);
      return alone(in);
    });
  });
  auto leading_separator = Parser<bool>([](Input in) -> Outcome<bool> {
    return Success<bool>{!in.at_end() && is_separator(in.peek()), in.pos};
  });
  return strtype::bind(leading_separator, [absolute, relative](bool lead) { return lead ? absolute : relative; });
}

}  // namespace builtin_detail

/// Directories, a file name and an optional extension. With `pinned` unset
/// either separator is accepted but the first one used must be used
/// throughout; with `pinned` set only that separator is accepted.
inline Parser<Parsed> file_path_parser(std::optional<char32_t> pinned = std::nullopt) {
  return map(builtin_detail::path_pieces(pinned), [](const builtin_detail::PathPieces& pieces) {
    FilePath fp;
    fp.absolute = pieces.absolute;
    fp.separator = pieces.first_separator ? pieces.first_separator->value : U'/';
    const auto& segs = pieces.segments;
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) fp.dirs.push_back(segs[i].value);
    const Spanned<std::string>& file = segs.back();
    const std::u32string name = utf8::decode(file.value);
    const std::size_t dot = name.rfind(U'.');
    Parsed p{{}, {}};
    if (dot != std::u32string::npos && dot != 0 && dot + 1 < name.size()) {
      fp.file_name = utf8::encode(std::u32string_view(name).substr(0, dot));
      fp.ext = utf8::encode(std::u32string_view(name).substr(dot + 1));
      p.spans["fileName"] = Span{file.span.begin, file.span.begin + dot};
      p.spans["ext"] = Span{file.span.begin + dot + 1, file.span.end};
    } else {
      fp.file_name = file.value;
      p.spans["fileName"] = file.span;
    }
    if (segs.size() > 1) {
      p.spans["dirs"] = Span{segs.front().span.begin, segs[segs.size() - 2].span.end};
    } else {
      p.spans["dirs"] = Span{file.span.begin, file.span.begin};
    }
    if (pieces.first_separator) {
      p.spans["separator"] = pieces.first_separator->span;
    } else {
      p.spans["separator"] = Span{0, 0};
    }
    p.structure = StructuredValue{std::move(fp)};
    return p;
  });
}

inline SafeStringDescriptor file_path_descriptor() {
  return SafeStringDescriptor{"FilePath",
                              file_path_parser(),
                              std::nullopt,
                              {},
                              {{"dirs", pattern_token("([^/\\\\]+([/\\\\][^/\\\\]+)*)?")},
                               {"fileName", pattern_token("[^/\\\\]+")},
                               {"ext", pattern_token("[^/\\\\.]+")},
                               {"separator", pattern_token("[/\\\\]?")}},
                              {"absolute", "dirs", "fileName", "ext", "separator"}};
}

namespace builtin_detail {
inline SafeStringDescriptor pinned_path(std::string name, char32_t sep) {
  SafeStringDescriptor d = file_path_descriptor();
  d.type_name = std::move(name);
  d.recogniser = file_path_parser(sep);
  d.parent = "FilePath";
  d.overridden_fields = {"separator"};
  d.field_recognisers.insert_or_assign("separator", fallback(matched(char_(sep)), std::string()));
  return d;
}
}  // namespace builtin_detail

inline SafeStringDescriptor unix_path_descriptor() { return builtin_detail::pinned_path("UnixPath", U'/'); }
inline SafeStringDescriptor windows_path_descriptor() { return builtin_detail::pinned_path("WindowsPath", U'\\'); }

/// A hidden file directly inside "home".
inline SafeStringDescriptor home_dot_file_descriptor() {
  return derive_subtype(file_path_descriptor(), "HomeDotFile",
                        {{"dirs", literal("home")}, {"fileName", pattern_token("\\.[^/\\\\]+")}});
}

// ------------------------------------------------------------------ USPhone

inline constexpr std::string_view kExchangePattern = "[2-9][0-9]{2}";
inline constexpr std::string_view kLinePattern = "[0-9]{4}";

/// NPA-NXX-XXXX with each separator one of space . / - or nothing.
inline Parser<Parsed> us_phone_parser() {
  auto separator = matched(one_of(" ./-")).fallback("");
  auto areacode = spanned(pattern_token(kExchangePattern).map(builtin_detail::decimal_value).desc("a valid area code"));
  auto nxx = spanned(pattern_token(kExchangePattern).map(builtin_detail::decimal_value).desc("a valid office code"));
  auto xxxx = spanned(pattern_token(kLinePattern).map(builtin_detail::decimal_value).desc("a valid identifier"));
  return map(seq(areacode, separator, nxx, separator, xxxx), [](const auto& t) {
    const auto& [a, s1, n, s2, x] = t;
    Parsed p{StructuredValue{USPhone{a.value, n.value, x.value}}, {}};
    p.spans["area"] = a.span;
    p.spans["office"] = n.span;
    p.spans["uniq"] = x.span;
    return p;
  });
}

inline SafeStringDescriptor us_phone_descriptor() {
  auto exchange = pattern_token(kExchangePattern);
  return SafeStringDescriptor{"USPhone",
                              us_phone_parser(),
                              std::nullopt,
                              {},
                              {{"area", exchange}, {"office", exchange}, {"uniq", pattern_token(kLinePattern)}},
                              {"area", "office", "uniq"}};
}

// --------------------------------------------------------------- EqualAandB

/// a^n b^n: counts the run of a's, then demands exactly as many b's.
inline Parser<Parsed> equal_a_and_b_parser() {
  auto as = many(char_(U'a'));
  return strtype::bind(as, [](const std::vector<char32_t>& run) {
    const std::size_t n = run.size();
    return map(repeat_exact(char_(U'b'), n),
               [n](const std::vector<char32_t>&) { return Parsed{StructuredValue{EqualAandB{n}}, {}}; });
  });
}

/// Values of this type keep only the count, not their input.
inline SafeStringDescriptor equal_a_and_b_descriptor() {
  return SafeStringDescriptor{"EqualAandB", equal_a_and_b_parser(), std::nullopt, {}, {}, {"count"}, false};
}

// ------------------------------------------------------------------- InnerR

/// Splits at the first 'r'.
inline Parser<Parsed> inner_r_parser() {
  auto left = spanned(matched(many(satisfy([](char32_t c) { return c != U'r'; }, "a character other than 'r'"))));
  auto pivot = desc(char_(U'r'), "the pivot 'r'");
  auto right = spanned(matched(many(any_char())));
  return map(seq(left, pivot, right), [](const auto& t) {
    const auto& [l, r_, r] = t;
    Parsed p{StructuredValue{InnerR{l.value, r.value}}, {}};
    p.spans["left"] = l.span;
    p.spans["right"] = r.span;
    return p;
  });
}

inline SafeStringDescriptor inner_r_descriptor() {
  return SafeStringDescriptor{"InnerR",
                              inner_r_parser(),
                              std::nullopt,
                              {},
                              {{"left", pattern_token("[^r]*")}, {"right", pattern_token(".*")}},
                              {"left", "right"}};
}

// --------------------------------------------------------------------- Expr

namespace builtin_detail {

using BinaryOp = Expr (*)(Expr, Expr);

inline Parser<std::vector<char32_t>> spaces() { return many(one_of(" \t\n\r")); }

template <class A>
Parser<A> token(const Parser<A>& p) {
  return skip_right(p, spaces());
}

inline const Parser<Expr>& expression();

inline Parser<Expr> integer_literal() {
  return strtype::bind(pattern_token("[0-9]+"), [](const std::string& digits) {
    std::int64_t v = 0;
    for (char c : digits) {
      const int d = c - '0';
      if (v > (std::numeric_limits<std::int64_t>::max() - d) / 10) return fail<Expr>("an integer that fits in 64 bits");
      v = v * 10 + d;
    }
    return succeed(Expr::constant(v));
  }).desc("a number");
}

inline const Parser<Expr>& expression() {
  static const Parser<Expr> parser = [] {
    auto factor = alt(token(integer_literal()),
                      skip_left(token(char_(U'(')), skip_right(lazy([] { return expression(); }), token(char_(U')')))));
    auto times = map(token(char_(U'*')), [](char32_t) -> BinaryOp { return &Expr::mult; });
    auto plus = map(token(char_(U'+')), [](char32_t) -> BinaryOp { return &Expr::add; });
    auto term = chain_left(factor, times);
    return chain_left(term, plus);
  }();
  return parser;
}

}  // namespace builtin_detail

/// Infix '+' and '*' over unsigned integers with parentheses; '*' binds
/// tighter, both associate left, whitespace between tokens is ignored.
inline Parser<Expr> expr_parser() { return skip_left(builtin_detail::spaces(), builtin_detail::expression()); }

inline SafeStringDescriptor expr_descriptor() {
  auto recogniser = map(expr_parser(), [](const Expr& e) { return Parsed{StructuredValue{e}, {}}; });
  return SafeStringDescriptor{"Expr", recogniser, std::nullopt, {}, {}, {"kind", "n", "left", "right"}};
}

// ------------------------------------------------------ monolithic builtins

namespace builtin_detail {
inline SafeStringDescriptor monolithic_or_throw(std::string name, std::string_view pattern) {
  auto d = monolithic(std::move(name), pattern);
  if (!d) throw std::logic_error(d.error().message());
  return std::move(d).value();
}
}  // namespace builtin_detail

inline SafeStringDescriptor sanitised_descriptor() {
  return builtin_detail::monolithic_or_throw("Sanitised", builtin_detail::kAllowlist);
}

inline SafeStringDescriptor user_name_descriptor() {
  return builtin_detail::monolithic_or_throw("UserName", builtin_detail::kAllowlist);
}

inline Parser<Parsed> sanitised_parser() { return sanitised_descriptor().recogniser; }
inline Parser<Parsed> user_name_parser() { return user_name_descriptor().recogniser; }

inline SafeStringDescriptor string_descriptor() {
  return builtin_detail::monolithic_or_throw(std::string(kStringType), ".*");
}

// ----------------------------------------------------------------- registry

/// Every builtin descriptor, parents before children.
inline std::vector<SafeStringDescriptor> builtin_descriptors() {
  return {string_descriptor(),      css_colour_descriptor(),     css_unit_descriptor(),
          px_or_auto_descriptor(),  email_descriptor(),          gmail_descriptor(),
          file_path_descriptor(),   unix_path_descriptor(),      windows_path_descriptor(),
          home_dot_file_descriptor(), us_phone_descriptor(),     equal_a_and_b_descriptor(),
          inner_r_descriptor(),     expr_descriptor(),           sanitised_descriptor(),
          user_name_descriptor()};
}

inline Registry make_builtin_registry() {
  Registry r;
  for (auto& d : builtin_descriptors()) {
    auto h = r.register_type(std::move(d));
    if (!h) throw std::logic_error("builtin registration failed: " + h.error().message());
  }
  return r;
}

/// Shared, read-only registry of the builtins.
inline const Registry& builtin_registry() {
  static const Registry registry = make_builtin_registry();
  return registry;
}

}  // namespace strtype
