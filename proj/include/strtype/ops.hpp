#pragma once

// Operations over typed values that either preserve the type by
// construction or re-check just enough to know they do.

#include <algorithm>
#include <string>
#include <vector>

#include "strtype/parser.hpp"
#include "strtype/safestring.hpp"
#include "strtype/structures.hpp"

namespace strtype {

/// Component-wise addition, saturating at 255.
inline CssColour blend(const CssColour& a, const CssColour& b) {
  auto add = [](int x, int y) { return std::min(255, x + y); };
  return CssColour{add(a.red, b.red), add(a.green, b.green), add(a.blue, b.blue)};
}

inline Either<SafeStringValue> blend(const SafeStringValue& a, const SafeStringValue& b) {
  const auto* x = a.as<CssColour>();
  const auto* y = b.as<CssColour>();
  if (!x || !y) return OpError::of(ErrorKind::kIncompatibleTypes, "blend needs two colours");
  return SafeStringValue::unchecked(a.type_name(), StructuredValue{blend(*x, *y)});
}

/// Joins the names; the domain comes from `a`.
inline Email concat_names(const Email& a, const Email& b) {
  return Email{a.name + b.name, a.domain_left, a.domain_right};
}

/// The name alphabet is closed under concatenation, so the result keeps a's
/// type without re-parsing. Types with their own name recogniser should go
/// through append_to_name instead.
inline Either<SafeStringValue> concat_names(const SafeStringValue& a, const SafeStringValue& b) {
  const auto* x = a.as<Email>();
  const auto* y = b.as<Email>();
  if (!x || !y) return OpError::of(ErrorKind::kIncompatibleTypes, "concat_names needs two email addresses");
  return SafeStringValue::unchecked(a.type_name(), StructuredValue{concat_names(*x, *y)});
}

/// Plain text concatenation of the casts. The result is only a string.
inline SafeStringValue raw_concat(const SafeStringValue& a, const SafeStringValue& b) {
  return SafeStringValue::unchecked(std::string(kStringType), StructuredValue{Opaque{cast(a) + cast(b)}});
}

/// Grows the name field, re-running only that field's recogniser from e's
/// type. The result has e's type.
inline Either<SafeStringValue> append_to_name(const Registry& registry, const SafeStringValue& e, std::string_view s) {
  const auto* email = e.as<Email>();
  if (!email) return OpError::of(ErrorKind::kIncompatibleTypes, e.type_name() + " has no email structure");
  const SafeStringDescriptor* d = registry.find(e.type_name());
  if (!d) return OpError::of(ErrorKind::kUnknownType, e.type_name());
  auto it = d->field_recognisers.find("name");
  if (it == d->field_recognisers.end()) return OpError::of(ErrorKind::kUnknownField, "name");
  std::string grown = email->name + std::string(s);
  auto r = run_to_end(it->second, std::string_view(grown));
  if (!r) {
    const Failure& f = r.failure();
    return OpError{ErrorKind::kClosureViolation, "name \"" + grown + "\"",
                   ParseError{f.pos, "name: " + f.expected, e.type_name()}};
  }
  return SafeStringValue::unchecked(e.type_name(), StructuredValue{Email{grown, email->domain_left, email->domain_right}});
}

/// A field value tagged with where it came from.
struct Projection {
  FieldValue value;
  std::string origin_type;
  std::string field_name;

  friend bool operator==(const Projection&, const Projection&) = default;
};

inline Either<Projection> project_field(const SafeStringValue& v, std::string_view field) {
  auto f = field_of(v.structure(), field);
  if (!f) return OpError::of(ErrorKind::kUnknownField, v.type_name() + "." + std::string(field));
  return Projection{std::move(*f), v.type_name(), std::string(field)};
}

/// Pixels per unit: 1in = 96px = 72pt = 6pc = 2.54cm.
inline double px_per(LengthUnit u) {
  switch (u) {
    case LengthUnit::kPx:
      return 1.0;
    case LengthUnit::kPt:
      return 96.0 / 72.0;
    case LengthUnit::kPc:
      return 16.0;
    case LengthUnit::kCm:
      return 96.0 / 2.54;
    case LengthUnit::kAuto:
      break;
  }
  return 0.0;
}

inline Either<double> convert(const CssUnit& u, LengthUnit to) {
  if (u.unit == LengthUnit::kAuto || to == LengthUnit::kAuto) {
    return OpError::of(ErrorKind::kIncompatibleTypes, "auto has no length");
  }
  return u.value * px_per(u.unit) / px_per(to);
}

/// Sum in the left operand's unit.
inline Either<CssUnit> add_units(const CssUnit& a, const CssUnit& b) {
  if (a.unit == LengthUnit::kAuto || b.unit == LengthUnit::kAuto) {
    return OpError::of(ErrorKind::kIncompatibleTypes, "cannot add auto");
  }
  auto rhs = convert(b, a.unit);
  return CssUnit{a.unit, a.value + *rhs};
}

inline Either<SafeStringValue> add_units(const SafeStringValue& a, const SafeStringValue& b) {
  const auto* x = a.as<CssUnit>();
  const auto* y = b.as<CssUnit>();
  if (!x || !y) return OpError::of(ErrorKind::kIncompatibleTypes, "add_units needs two lengths");
  auto sum = add_units(*x, *y);
  if (!sum) return sum.error();
  // The unit is a's, so any restriction a's type puts on units still holds.
  return SafeStringValue::unchecked(a.type_name(), StructuredValue{*sum});
}

/// Every subtree, root first.
inline std::vector<Expr> sub_expressions(const Expr& e) {
  std::vector<Expr> out;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr top = stack.back();
    stack.pop_back();
    out.push_back(top);
    if (top.kind() != Expr::Kind::kConst) {
      stack.push_back(top.right());
      stack.push_back(top.left());
    }
  }
  return out;
}

inline std::string normalize(const SafeStringValue& v) { return cast(v); }

}  // namespace strtype
