#pragma once

// Structured values for the builtin string types, together with their
// canonical rendering (cast) and field access.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "strtype/parser.hpp"
#include "strtype/utf8.hpp"

namespace strtype {

struct CssColour {
  int red = 0;
  int green = 0;
  int blue = 0;

  friend bool operator==(const CssColour&, const CssColour&) = default;
};

enum class LengthUnit { kPx, kPt, kPc, kCm, kAuto };

inline std::string_view unit_suffix(LengthUnit u) {
  switch (u) {
    case LengthUnit::kPx:
      return "px";
    case LengthUnit::kPt:
      return "pt";
    case LengthUnit::kPc:
      return "pc";
    case LengthUnit::kCm:
      return "cm";
    case LengthUnit::kAuto:
      return "auto";
  }
  return "";
}

struct CssUnit {
  LengthUnit unit = LengthUnit::kAuto;
  double value = 0.0;  // ignored for kAuto

  static CssUnit px(double v) { return {LengthUnit::kPx, v}; }
  static CssUnit pt(double v) { return {LengthUnit::kPt, v}; }
  static CssUnit pc(double v) { return {LengthUnit::kPc, v}; }
  static CssUnit cm(double v) { return {LengthUnit::kCm, v}; }
  static CssUnit automatic() { return {LengthUnit::kAuto, 0.0}; }

  bool is_auto() const noexcept { return unit == LengthUnit::kAuto; }

  friend bool operator==(const CssUnit& a, const CssUnit& b) {
    if (a.unit != b.unit) return false;
    return a.is_auto() || a.value == b.value;
  }
};

struct Email {
  std::string name;
  std::string domain_left;
  std::string domain_right;

  friend bool operator==(const Email&, const Email&) = default;
};

struct FilePath {
  bool absolute = false;
  std::vector<std::string> dirs;
  std::string file_name;
  std::optional<std::string> ext;
  char32_t separator = U'/';

  friend bool operator==(const FilePath&, const FilePath&) = default;
};

struct USPhone {
  int area = 0;
  int office = 0;
  int uniq = 0;

  friend bool operator==(const USPhone&, const USPhone&) = default;
};

struct EqualAandB {
  std::size_t count = 0;

  friend bool operator==(const EqualAandB&, const EqualAandB&) = default;
};

struct InnerR {
  std::string left;
  std::string right;

  friend bool operator==(const InnerR&, const InnerR&) = default;
};

/// Arithmetic expression tree: Const | Add | Mult. Immutable, shares subtrees.
class Expr {
 public:
  enum class Kind { kConst, kAdd, kMult };

  static Expr constant(std::int64_t n) { return Expr(std::make_shared<const Node>(Node{Kind::kConst, n, {}, {}})); }
  static Expr add(Expr l, Expr r) { return binary(Kind::kAdd, std::move(l), std::move(r)); }
  static Expr mult(Expr l, Expr r) { return binary(Kind::kMult, std::move(l), std::move(r)); }

  Kind kind() const noexcept { return node_->kind; }
  std::int64_t value() const noexcept { return node_->n; }
  Expr left() const { return Expr(node_->l); }
  Expr right() const { return Expr(node_->r); }

  std::size_t depth() const {
    if (kind() == Kind::kConst) return 1;
    return 1 + std::max(left().depth(), right().depth());
  }

  /// "(Add (Mult (Const 3) (Const 4)) (Const 5))"
  std::string to_sexpr() const {
    switch (kind()) {
      case Kind::kConst:
        return "(Const " + std::to_string(value()) + ")";
      case Kind::kAdd:
        return "(Add " + left().to_sexpr() + " " + right().to_sexpr() + ")";
      case Kind::kMult:
        return "(Mult " + left().to_sexpr() + " " + right().to_sexpr() + ")";
    }
    return {};
  }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    if (a.kind() == Kind::kConst) return a.value() == b.value();
    return a.left() == b.left() && a.right() == b.right();
  }

 private:
  struct Node {
    Kind kind;
    std::int64_t n;
    std::shared_ptr<const Node> l;
    std::shared_ptr<const Node> r;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Expr binary(Kind k, Expr l, Expr r) {
    return Expr(std::make_shared<const Node>(Node{k, 0, std::move(l.node_), std::move(r.node_)}));
  }

  std::shared_ptr<const Node> node_;
};

/// Payload of a monolithic type: the accepted text and nothing else.
struct Opaque {
  std::string raw;

  friend bool operator==(const Opaque&, const Opaque&) = default;
};

struct StructuredValue;

/// A parent structure followed by extra text fields appended by a subtype.
struct Extended {
  std::shared_ptr<const StructuredValue> base;
  std::vector<std::pair<std::string, std::string>> extra;
};

struct StructuredValue {
  using Variant = std::variant<CssColour, CssUnit, Email, FilePath, USPhone, EqualAandB, InnerR, Expr, Opaque, Extended>;
  Variant v;

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v);
  }
};

inline bool operator==(const Extended& a, const Extended& b);

inline bool operator==(const StructuredValue& a, const StructuredValue& b) { return a.v == b.v; }

inline bool operator==(const Extended& a, const Extended& b) {
  if (a.extra != b.extra) return false;
  if (!a.base || !b.base) return a.base == b.base;
  return *a.base == *b.base;
}

/// Codepoint spans of named fields within a rendered or parsed string.
using FieldSpans = std::map<std::string, Span>;

struct Rendered {
  std::string text;
  FieldSpans spans;
};

using FieldValue = std::variant<std::string, std::int64_t, double, bool, std::vector<std::string>>;

namespace detail {

inline std::size_t codepoints(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

class Builder {
 public:
  void put(std::string_view s) {
    text_ += s;
    cps_ += codepoints(s);
  }
  void put(char32_t c) {
    utf8::append(text_, c);
    ++cps_;
  }
  void field(const std::string& name, std::string_view s) {
    const std::size_t begin = cps_;
    put(s);
    spans_[name] = Span{begin, cps_};
  }
  std::size_t mark() const noexcept { return cps_; }
  void span(const std::string& name, std::size_t begin) { spans_[name] = Span{begin, cps_}; }
  void merge(const FieldSpans& inner, std::size_t offset) {
    for (const auto& [k, s] : inner) spans_[k] = Span{s.begin + offset, s.end + offset};
  }
  Rendered finish() && { return Rendered{std::move(text_), std::move(spans_)}; }

 private:
  std::string text_;
  std::size_t cps_ = 0;
  FieldSpans spans_;
};

inline std::string hex2(int v) {
  char buf[3];
  std::snprintf(buf, sizeof buf, "%02x", v);
  return buf;
}

inline std::string padded(int v, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*d", width, v);
  return buf;
}

}  // namespace detail

/// Shortest fixed-notation decimal that reads back to the same double.
inline std::string format_number(double v) {
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc{}) return std::to_string(v);
  return std::string(buf, end);
}

namespace detail {

inline bool needs_parens(const Expr& child, Expr::Kind parent, bool right_side) {
  if (child.kind() == Expr::Kind::kConst) return false;
  if (parent == Expr::Kind::kMult) {
    // Add under Mult always; Mult on the right would reassociate.
    return child.kind() == Expr::Kind::kAdd || right_side;
  }
  return right_side && child.kind() == Expr::Kind::kAdd;
}

inline void render_expr(std::string& out, const Expr& e) {
  if (e.kind() == Expr::Kind::kConst) {
    out += std::to_string(e.value());
    return;
  }
  auto side = [&](const Expr& c, bool right) {
    const bool parens = needs_parens(c, e.kind(), right);
    if (parens) out += '(';
    render_expr(out, c);
    if (parens) out += ')';
  };
  side(e.left(), false);
  out += e.kind() == Expr::Kind::kAdd ? " + " : " * ";
  side(e.right(), true);
}

}  // namespace detail

inline std::string render_expr(const Expr& e) {
  std::string out;
  detail::render_expr(out, e);
  return out;
}

inline Rendered render(const StructuredValue& s);

namespace detail {

inline Rendered render_one(const CssColour& c) {
  Builder b;
  b.put("#");
  b.field("red", hex2(c.red));
  b.field("green", hex2(c.green));
  b.field("blue", hex2(c.blue));
  return std::move(b).finish();
}

inline Rendered render_one(const CssUnit& u) {
  Builder b;
  if (u.is_auto()) {
    b.field("unit", "auto");
  } else {
    b.field("value", format_number(u.value));
    b.field("unit", unit_suffix(u.unit));
  }
  return std::move(b).finish();
}

inline Rendered render_one(const Email& e) {
  Builder b;
  b.field("name", e.name);
  b.put("@");
  b.field("domainLeft", e.domain_left);
  b.put(".");
  b.field("domainRight", e.domain_right);
  return std::move(b).finish();
}

inline Rendered render_one(const FilePath& p) {
  Builder b;
  std::optional<std::size_t> first_sep;
  auto sep = [&] {
    if (!first_sep) first_sep = b.mark();
    b.put(p.separator);
  };
  if (p.absolute) sep();
  const std::size_t dirs_begin = b.mark();
  for (std::size_t i = 0; i < p.dirs.size(); ++i) {
    if (i > 0) sep();
    b.put(p.dirs[i]);
  }
  b.span("dirs", dirs_begin);
  if (!p.dirs.empty()) sep();
  b.field("fileName", p.file_name);
  if (p.ext) {
    b.put(".");
    b.field("ext", *p.ext);
  }
  Rendered r = std::move(b).finish();
  const std::size_t at = first_sep.value_or(0);
  r.spans["separator"] = Span{at, first_sep ? at + 1 : at};
  return r;
}

inline Rendered render_one(const USPhone& p) {
  Builder b;
  b.field("area", padded(p.area, 3));
  b.put("-");
  b.field("office", padded(p.office, 3));
  b.put("-");
  b.field("uniq", padded(p.uniq, 4));
  return std::move(b).finish();
}

inline Rendered render_one(const EqualAandB& e) {
  return Rendered{std::string(e.count, 'a') + std::string(e.count, 'b'), {}};
}

inline Rendered render_one(const InnerR& r) {
  Builder b;
  b.field("left", r.left);
  b.put("r");
  b.field("right", r.right);
  return std::move(b).finish();
}

inline Rendered render_one(const Expr& e) { return Rendered{render_expr(e), {}}; }

inline Rendered render_one(const Opaque& o) {
  Builder b;
  b.field("raw", o.raw);
  return std::move(b).finish();
}

inline Rendered render_one(const Extended& x) {
  Builder b;
  if (x.base) {
    Rendered base = render(*x.base);
    b.merge(base.spans, 0);
    b.put(base.text);
  }
  for (const auto& [name, text] : x.extra) b.field(name, text);
  return std::move(b).finish();
}

}  // namespace detail

/// The canonical string for a structure, with the spans each field occupies.
inline Rendered render(const StructuredValue& s) {
  return std::visit([](const auto& x) { return detail::render_one(x); }, s.v);
}

inline std::optional<FieldValue> field_of(const StructuredValue& s, std::string_view name);

namespace detail {

inline std::optional<FieldValue> field_one(const CssColour& c, std::string_view n) {
  if (n == "red") return FieldValue{std::int64_t{c.red}};
  if (n == "green") return FieldValue{std::int64_t{c.green}};
  if (n == "blue") return FieldValue{std::int64_t{c.blue}};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const CssUnit& u, std::string_view n) {
  if (n == "unit") return FieldValue{std::string(unit_suffix(u.unit))};
  if (n == "value" && !u.is_auto()) return FieldValue{u.value};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const Email& e, std::string_view n) {
  if (n == "name") return FieldValue{e.name};
  if (n == "domainLeft") return FieldValue{e.domain_left};
  if (n == "domainRight") return FieldValue{e.domain_right};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const FilePath& p, std::string_view n) {
  if (n == "absolute") return FieldValue{p.absolute};
  if (n == "dirs") return FieldValue{p.dirs};
  if (n == "fileName") return FieldValue{p.file_name};
  if (n == "ext" && p.ext) return FieldValue{*p.ext};
  if (n == "separator") return FieldValue{utf8::encode(p.separator)};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const USPhone& p, std::string_view n) {
  if (n == "area") return FieldValue{std::int64_t{p.area}};
  if (n == "office") return FieldValue{std::int64_t{p.office}};
  if (n == "uniq") return FieldValue{std::int64_t{p.uniq}};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const EqualAandB& e, std::string_view n) {
  if (n == "count") return FieldValue{static_cast<std::int64_t>(e.count)};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const InnerR& r, std::string_view n) {
  if (n == "left") return FieldValue{r.left};
  if (n == "right") return FieldValue{r.right};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const Expr& e, std::string_view n) {
  const bool leaf = e.kind() == Expr::Kind::kConst;
  if (n == "kind") {
    return FieldValue{std::string(leaf ? "const" : (e.kind() == Expr::Kind::kAdd ? "add" : "mult"))};
  }
  if (n == "n" && leaf) return FieldValue{e.value()};
  if (n == "left" && !leaf) return FieldValue{render_expr(e.left())};
  if (n == "right" && !leaf) return FieldValue{render_expr(e.right())};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const Opaque& o, std::string_view n) {
  if (n == "raw") return FieldValue{o.raw};
  return std::nullopt;
}

inline std::optional<FieldValue> field_one(const Extended& x, std::string_view n) {
  for (const auto& [name, text] : x.extra) {
    if (name == n) return FieldValue{text};
  }
  if (x.base) return field_of(*x.base, n);
  return std::nullopt;
}

}  // namespace detail

/// The named field of a structure, or nullopt when absent.
inline std::optional<FieldValue> field_of(const StructuredValue& s, std::string_view name) {
  return std::visit([name](const auto& x) { return detail::field_one(x, name); }, s.v);
}

inline std::string field_to_string(const FieldValue& f) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t n) const { return std::to_string(n); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::vector<std::string>& v) const {
      std::string out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i];
      }
      return out;
    }
  };
  return std::visit(Visitor{}, f);
}

}  // namespace strtype
