#pragma once

// Registration, construction, cast, equality and subtype conversion for
// structured strings.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "strtype/parser.hpp"
#include "strtype/pattern.hpp"
#include "strtype/structures.hpp"
#include "strtype/utf8.hpp"

namespace strtype {

/// The root type every value widens to.
inline constexpr std::string_view kStringType = "string";

struct ParseError {
  std::size_t pos = 0;
  std::string expected;
  std::string type_name;

  friend bool operator==(const ParseError&, const ParseError&) = default;
};

enum class ErrorKind {
  kParseError,
  kClosureViolation,
  kIncompatibleTypes,
  kUnknownType,
  kUnknownField,
  kDuplicateType,
  kUnknownParent,
  kInvalidDescriptor,
  kNotASubtype,
  kNotASupertype,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::kParseError:
      return "ParseError";
    case ErrorKind::kClosureViolation:
      return "ClosureViolation";
    case ErrorKind::kIncompatibleTypes:
      return "IncompatibleTypes";
    case ErrorKind::kUnknownType:
      return "UnknownType";
    case ErrorKind::kUnknownField:
      return "UnknownField";
    case ErrorKind::kDuplicateType:
      return "DuplicateType";
    case ErrorKind::kUnknownParent:
      return "UnknownParent";
    case ErrorKind::kInvalidDescriptor:
      return "InvalidDescriptor";
    case ErrorKind::kNotASubtype:
      return "NotASubtype";
    case ErrorKind::kNotASupertype:
      return "NotASupertype";
  }
  return "?";
}

struct OpError {
  ErrorKind kind;
  std::string detail;
  std::optional<ParseError> parse;  // set for kParseError and kClosureViolation

  static OpError of(ErrorKind k, std::string detail) { return OpError{k, std::move(detail), std::nullopt}; }

  std::string message() const {
    std::string out(to_string(kind));
    if (!detail.empty()) out += ": " + detail;
    if (parse) out += " (expected " + parse->expected + " at " + std::to_string(parse->pos) + ")";
    return out;
  }
};

/// Either a value or the error explaining why there is none.
template <class T>
class Either {
 public:
  Either(T value) : v_(std::in_place_index<0>, std::move(value)) {}     // NOLINT(google-explicit-constructor)
  Either(OpError error) : v_(std::in_place_index<1>, std::move(error)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return v_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& { return std::get<0>(v_); }
  T&& value() && { return std::get<0>(std::move(v_)); }
  const T* operator->() const { return &std::get<0>(v_); }
  const T& operator*() const& { return std::get<0>(v_); }

  const OpError& error() const { return std::get<1>(v_); }

  template <class F>
  auto and_then(F f) const -> std::invoke_result_t<F, const T&> {
    if (!ok()) return error();
    return f(value());
  }

 private:
  std::variant<T, OpError> v_;
};

/// What a full-string recogniser yields: the structure and where each field
/// sat in the input.
struct Parsed {
  StructuredValue structure;
  FieldSpans spans;
};

struct SafeStringDescriptor {
  std::string type_name;
  Parser<Parsed> recogniser;
  std::optional<std::string> parent;
  /// Fields whose sub-recogniser differs from the parent's.
  std::set<std::string> overridden_fields;
  /// Membership test per field, applied to the field's text alone.
  std::map<std::string, Parser<std::string>> field_recognisers;
  /// Every field a value of this type may expose.
  std::vector<std::string> field_names;
  /// When false, values keep no copy of their input and raw() is the cast.
  bool retain_raw = true;
};

class Registry;

/// An accepted string together with its structure. Immutable.
class SafeStringValue {
 public:
  const std::string& type_name() const noexcept { return type_name_; }
  const StructuredValue& structure() const noexcept { return structure_; }
  const FieldSpans& spans() const noexcept { return spans_; }
  bool retains_raw() const noexcept { return raw_.has_value(); }

  /// The original input (or the cast, for types that drop it).
  std::string raw() const { return raw_ ? *raw_ : render(structure_).text; }

  template <class T>
  const T* as() const noexcept {
    return structure_.get_if<T>();
  }

  /// Builds a value from a structure known to satisfy `type_name`'s
  /// invariants. The raw text is the cast.
  static SafeStringValue unchecked(std::string type_name, StructuredValue structure) {
    Rendered r = render(structure);
    return SafeStringValue(std::move(type_name), std::move(structure), std::move(r.text), std::move(r.spans));
  }

  SafeStringValue rebind(std::string type_name) const {
    SafeStringValue copy = *this;
    copy.type_name_ = std::move(type_name);
    return copy;
  }

 private:
  friend class Registry;

  SafeStringValue(std::string type_name, StructuredValue structure, std::optional<std::string> raw, FieldSpans spans)
      : type_name_(std::move(type_name)),
        structure_(std::move(structure)),
        raw_(std::move(raw)),
        spans_(std::move(spans)) {}

  std::string type_name_;
  StructuredValue structure_;
  std::optional<std::string> raw_;
  FieldSpans spans_;
};

/// Canonical raw string for a value.
inline std::string cast(const SafeStringValue& v) { return render(v.structure()).text; }

/// Character-identical original inputs; types are ignored.
inline bool raw_eq(const SafeStringValue& a, const SafeStringValue& b) { return a.raw() == b.raw(); }

/// Equal canonical casts; types are ignored.
inline bool weak_eq(const SafeStringValue& a, const SafeStringValue& b) { return cast(a) == cast(b); }

/// Same type and component-wise equal structure.
inline bool strict_eq(const SafeStringValue& a, const SafeStringValue& b) {
  return a.type_name() == b.type_name() && a.structure() == b.structure();
}

// Bindings for host operators: `==` is weak, `===` is strict.
inline bool double_eq(const SafeStringValue& a, const SafeStringValue& b) { return weak_eq(a, b); }
inline bool triple_eq(const SafeStringValue& a, const SafeStringValue& b) { return strict_eq(a, b); }

struct TypeHandle {
  const SafeStringDescriptor* descriptor = nullptr;

  const std::string& name() const { return descriptor->type_name; }
};

/// A whole-string recogniser that stores only the accepted text.
inline Either<SafeStringDescriptor> monolithic(std::string type_name, std::string_view pattern) {
  try {
    auto token = pattern_token(pattern);
    auto recogniser = map(token, [](const std::string& raw) {
      Parsed p{StructuredValue{Opaque{raw}}, {}};
      p.spans["raw"] = Span{0, detail::codepoints(raw)};
      return p;
    });
    SafeStringDescriptor d{std::move(type_name), recogniser, std::nullopt, {}, {{"raw", token}}, {"raw"}, true};
    return d;
  } catch (const PatternError& e) {
    return OpError::of(ErrorKind::kInvalidDescriptor, e.what());
  }
}

/// Types by name. Build it, then share it read-only.
class Registry {
 public:
  Either<TypeHandle> register_type(SafeStringDescriptor d) {
    if (d.type_name.empty()) return OpError::of(ErrorKind::kInvalidDescriptor, "empty type name");
    if (types_.count(d.type_name) != 0) {
      return OpError::of(ErrorKind::kDuplicateType, d.type_name);
    }
    if (d.parent) {
      if (types_.count(*d.parent) == 0) return OpError::of(ErrorKind::kUnknownParent, *d.parent);
      if (d.overridden_fields.empty()) {
        return OpError::of(ErrorKind::kInvalidDescriptor, d.type_name + " has a parent but overrides no field");
      }
    } else if (!d.overridden_fields.empty()) {
      return OpError::of(ErrorKind::kInvalidDescriptor, d.type_name + " overrides fields without a parent");
    }
    for (const auto& f : d.overridden_fields) {
      if (d.field_recognisers.count(f) == 0) {
        return OpError::of(ErrorKind::kInvalidDescriptor, d.type_name + " has no recogniser for field " + f);
      }
    }
    auto [it, inserted] = types_.emplace(d.type_name, std::move(d));
    return TypeHandle{&it->second};
  }

  const SafeStringDescriptor* find(std::string_view name) const {
    auto it = types_.find(std::string(name));
    return it == types_.end() ? nullptr : &it->second;
  }

  bool contains(std::string_view name) const { return find(name) != nullptr; }

  /// All descriptors, sorted by name.
  std::vector<const SafeStringDescriptor*> types() const {
    std::vector<const SafeStringDescriptor*> out;
    out.reserve(types_.size());
    for (const auto& [name, d] : types_) out.push_back(&d);
    return out;
  }

  Either<SafeStringValue> from_raw(std::string_view type_name, std::string_view raw) const {
    const SafeStringDescriptor* d = find(type_name);
    if (!d) return OpError::of(ErrorKind::kUnknownType, std::string(type_name));
    auto r = run_to_end(d->recogniser, raw);
    if (!r) {
      const Failure& f = r.failure();
      return OpError{ErrorKind::kParseError, "", ParseError{f.pos, f.expected, d->type_name}};
    }
    Parsed parsed = std::move(r).value();
    std::optional<std::string> kept;
    if (d->retain_raw) kept = std::string(raw);
    return SafeStringValue(d->type_name, std::move(parsed.structure), std::move(kept), std::move(parsed.spans));
  }

  /// True when `ancestor` is `type` itself, a transitive parent, or the root
  /// string type.
  bool is_ancestor_or_self(std::string_view ancestor, std::string_view type) const {
    if (ancestor == kStringType) return true;
    const SafeStringDescriptor* d = find(type);
    while (d) {
      if (d->type_name == ancestor) return true;
      d = d->parent ? find(*d->parent) : nullptr;
    }
    return false;
  }

  /// Re-checks only the fields overridden between v's type and `sub_type`,
  /// each against the span of v's input it originally occupied.
  Either<SafeStringValue> narrow(const SafeStringValue& v, std::string_view sub_type) const {
    if (!find(sub_type)) return OpError::of(ErrorKind::kUnknownType, std::string(sub_type));
    if (v.type_name() == sub_type) return v;
    // Nothing is known about a plain string, so every field is checked.
    if (v.type_name() == kStringType) return from_raw(sub_type, v.raw());
    std::vector<const SafeStringDescriptor*> chain;
    for (const SafeStringDescriptor* d = find(sub_type); d; d = d->parent ? find(*d->parent) : nullptr) {
      if (d->type_name == v.type_name()) break;
      chain.push_back(d);
      if (!d->parent) {
        return OpError::of(ErrorKind::kNotASubtype, std::string(sub_type) + " is not a subtype of " + v.type_name());
      }
    }
    std::reverse(chain.begin(), chain.end());
    const std::u32string text = utf8::decode(v.raw());
    for (const SafeStringDescriptor* d : chain) {
      for (const std::string& field : d->overridden_fields) {
        auto span = v.spans().find(field);
        if (span == v.spans().end()) {
          return OpError::of(ErrorKind::kIncompatibleTypes, "value has no field " + field + " to re-check");
        }
        const Span s = span->second;
        const std::u32string_view piece = std::u32string_view(text).substr(s.begin, s.size());
        auto r = run_to_end(d->field_recognisers.at(field), piece);
        if (!r) {
          const Failure& f = r.failure();
          return OpError{ErrorKind::kParseError, "field " + field,
                         ParseError{s.begin + f.pos, field + ": " + f.expected, d->type_name}};
        }
      }
    }
    return v.rebind(std::string(sub_type));
  }

  /// Rebinds v to one of its supertypes without parsing. Widening to the
  /// root string type keeps only the cast.
  Either<SafeStringValue> widen(const SafeStringValue& v, std::string_view super_type) const {
    if (super_type == kStringType && v.type_name() != kStringType) {
      return SafeStringValue::unchecked(std::string(kStringType), StructuredValue{Opaque{cast(v)}});
    }
    if (!find(super_type)) return OpError::of(ErrorKind::kUnknownType, std::string(super_type));
    if (!is_ancestor_or_self(super_type, v.type_name())) {
      return OpError::of(ErrorKind::kNotASupertype, std::string(super_type) + " is not a supertype of " + v.type_name());
    }
    return v.rebind(std::string(super_type));
  }

 private:
  std::map<std::string, SafeStringDescriptor> types_;
};

/// A subtype that keeps the parent's recogniser and additionally requires
/// each overridden field's text to satisfy the replacement recogniser.
inline SafeStringDescriptor derive_subtype(const SafeStringDescriptor& parent, std::string type_name,
                                           std::map<std::string, Parser<std::string>> overrides) {
  SafeStringDescriptor d = parent;
  d.type_name = std::move(type_name);
  d.parent = parent.type_name;
  d.overridden_fields.clear();
  for (auto& [field, p] : overrides) {
    d.overridden_fields.insert(field);
    d.field_recognisers.insert_or_assign(field, p);
  }
  auto checks = std::move(overrides);
  auto base = parent.recogniser;
  d.recogniser = Parser<Parsed>([base, checks](Input in) -> Outcome<Parsed> {
    auto r = base(in);
    if (!r) return r;
    for (const auto& [field, p] : checks) {
      auto it = r.value().spans.find(field);
      if (it == r.value().spans.end()) return Failure{in.pos, field};
      const Span s = it->second;
      auto sub = run_to_end(p, in.text.substr(s.begin, s.size()));
      if (!sub) return Failure{s.begin + sub.failure().pos, field + ": " + sub.failure().expected};
    }
    return r;
  });
  return d;
}

/// A subtype whose grammar is the parent's followed by one more field.
/// Values carry the parent structure plus the extra field's text.
inline SafeStringDescriptor extend_subtype(const SafeStringDescriptor& parent, std::string type_name,
                                           std::string field, Parser<std::string> extra) {
  SafeStringDescriptor d = parent;
  d.type_name = std::move(type_name);
  d.parent = parent.type_name;
  d.overridden_fields = {field};
  d.field_recognisers.insert_or_assign(field, extra);
  d.field_names.push_back(field);
  auto base = parent.recogniser;
  d.recogniser = Parser<Parsed>([base, extra, field](Input in) -> Outcome<Parsed> {
    auto r = spanned(base)(in);
    if (!r) return r.failure();
    auto tail = spanned(extra)(in.at(r.next()));
    if (!tail) return tail.failure();
    Parsed inner = r.value().value;
    Extended x;
    if (auto* already = inner.structure.get_if<Extended>()) {
      x = *already;
    } else {
      x.base = std::make_shared<const StructuredValue>(std::move(inner.structure));
    }
    x.extra.emplace_back(field, tail.value().value);
    Parsed out{StructuredValue{std::move(x)}, std::move(inner.spans)};
    out.spans[field] = tail.value().span;
    return Success<Parsed>{std::move(out), tail.next()};
  });
  return d;
}

}  // namespace strtype
