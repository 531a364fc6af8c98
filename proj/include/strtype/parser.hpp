#pragma once

// Parser combinators over codepoint-indexed input.
//
// A Parser<A> is an immutable value wrapping a pure function from an input
// position to either Success{value, next} or Failure{pos, expected}. Choice is
// PEG-style ordered choice: alt() always retries the second branch from the
// original position.

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "strtype/pattern.hpp"
#include "strtype/utf8.hpp"

namespace strtype {

struct Input {
  std::u32string_view text;
  std::size_t pos = 0;

  bool at_end() const noexcept { return pos >= text.size(); }
  char32_t peek() const { return text[pos]; }
  Input at(std::size_t p) const noexcept { return Input{text, p}; }
};

struct Failure {
  std::size_t pos = 0;
  std::string expected;

  friend bool operator==(const Failure&, const Failure&) = default;
};

template <class A>
struct Success {
  A value;
  std::size_t next = 0;

  friend bool operator==(const Success&, const Success&) = default;
};

/// Raised when a repetition combinator's operand succeeds without consuming
/// input; such a loop would never terminate.
class NontermError : public std::logic_error {
 public:
  NontermError(const std::string& label, std::size_t pos)
      : std::logic_error("repeated parser '" + label + "' succeeded without consuming input at position " +
                         std::to_string(pos)),
        pos_(pos) {}

  std::size_t pos() const noexcept { return pos_; }

 private:
  std::size_t pos_;
};

template <class A>
class Outcome {
 public:
  Outcome(Success<A> s) : v_(std::move(s)) {}  // NOLINT(google-explicit-constructor)
  Outcome(Failure f) : v_(std::move(f)) {}     // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return v_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  const A& value() const& { return std::get<0>(v_).value; }
  A&& value() && { return std::move(std::get<0>(v_).value); }
  std::size_t next() const { return std::get<0>(v_).next; }
  const Success<A>& success() const { return std::get<0>(v_); }
  const Failure& failure() const { return std::get<1>(v_); }

  friend bool operator==(const Outcome&, const Outcome&) = default;

 private:
  std::variant<Success<A>, Failure> v_;
};

template <class A>
class Parser;

namespace detail {
template <class T>
struct is_parser : std::false_type {};
template <class T>
struct is_parser<Parser<T>> : std::true_type {};
}  // namespace detail

template <class A>
class Parser {
 public:
  using value_type = A;
  using Fn = std::function<Outcome<A>(Input)>;

  explicit Parser(Fn fn, std::string label = {})
      : fn_(std::make_shared<const Fn>(std::move(fn))), label_(std::move(label)) {}

  Outcome<A> operator()(Input in) const { return (*fn_)(in); }
  Outcome<A> parse(std::u32string_view text, std::size_t pos = 0) const { return (*fn_)(Input{text, pos}); }

  const std::string& label() const noexcept { return label_; }

  template <class B>
  Parser<std::pair<A, B>> then(const Parser<B>& q) const;
  template <class F>
  auto map(F f) const;
  template <class F>
  auto bind(F f) const;
  Parser<A> fallback(A dflt) const;
  Parser<A> desc(std::string label) const;

 private:
  std::shared_ptr<const Fn> fn_;
  std::string label_;
};

template <class A>
Parser<A> succeed(A v) {
  return Parser<A>([v = std::move(v)](Input in) -> Outcome<A> { return Success<A>{v, in.pos}; });
}

template <class A>
Parser<A> fail(std::string expected) {
  return Parser<A>([expected](Input in) -> Outcome<A> { return Failure{in.pos, expected}; }, expected);
}

template <class Pred>
Parser<char32_t> satisfy(Pred pred, std::string label) {
  return Parser<char32_t>(
      [pred = std::move(pred), label](Input in) -> Outcome<char32_t> {
        if (in.at_end() || !pred(in.peek())) return Failure{in.pos, label};
        return Success<char32_t>{in.peek(), in.pos + 1};
      },
      label);
}

inline Parser<char32_t> any_char() {
  return satisfy([](char32_t) { return true; }, "any character");
}

inline Parser<char32_t> digit() {
  return satisfy([](char32_t c) { return c >= U'0' && c <= U'9'; }, "digit");
}

inline Parser<char32_t> char_(char32_t expected) {
  return satisfy([expected](char32_t c) { return c == expected; }, "'" + utf8::encode(expected) + "'");
}

inline Parser<char32_t> one_of(std::string_view chars) {
  if (chars.empty()) throw std::invalid_argument("one_of: empty character set");
  std::u32string set = utf8::decode(chars);
  std::string label = "one of \"" + std::string(chars) + "\"";
  return satisfy([set](char32_t c) { return set.find(c) != std::u32string::npos; }, label);
}

inline Parser<std::string> literal(std::string_view text) {
  std::u32string want = utf8::decode(text);
  std::string label = "\"" + std::string(text) + "\"";
  return Parser<std::string>(
      [want, out = std::string(text), label](Input in) -> Outcome<std::string> {
        for (std::size_t i = 0; i < want.size(); ++i) {
          const std::size_t p = in.pos + i;
          if (p >= in.text.size() || in.text[p] != want[i]) return Failure{in.pos, label};
        }
        return Success<std::string>{out, in.pos + want.size()};
      },
      label);
}

/// Longest match of `pattern` at the current position. Throws PatternError
/// for unsupported syntax.
inline Parser<std::string> pattern_token(std::string_view pattern) {
  Pattern compiled = Pattern::compile(pattern);
  std::string label = "/" + std::string(pattern) + "/";
  return Parser<std::string>(
      [compiled, label](Input in) -> Outcome<std::string> {
        auto len = compiled.longest_match(in.text, in.pos);
        if (!len) return Failure{in.pos, label};
        return Success<std::string>{utf8::encode(in.text.substr(in.pos, *len)), in.pos + *len};
      },
      label);
}

/// Succeeds only at end of input.
inline Parser<std::monostate> eof() {
  return Parser<std::monostate>(
      [](Input in) -> Outcome<std::monostate> {
        if (!in.at_end()) return Failure{in.pos, "end of input"};
        return Success<std::monostate>{{}, in.pos};
      },
      "end of input");
}

template <class A, class B>
Parser<std::pair<A, B>> then(const Parser<A>& p, const Parser<B>& q) {
  return Parser<std::pair<A, B>>([p, q](Input in) -> Outcome<std::pair<A, B>> {
    auto first = p(in);
    if (!first) return first.failure();
    auto second = q(in.at(first.next()));
    if (!second) return second.failure();
    return Success<std::pair<A, B>>{{std::move(first).value(), std::move(second).value()}, second.next()};
  });
}

/// Runs both, keeps the left value.
template <class A, class B>
Parser<A> skip_right(const Parser<A>& p, const Parser<B>& q) {
  return Parser<A>([p, q](Input in) -> Outcome<A> {
    auto first = p(in);
    if (!first) return first;
    auto second = q(in.at(first.next()));
    if (!second) return second.failure();
    return Success<A>{std::move(first).value(), second.next()};
  });
}

/// Runs both, keeps the right value.
template <class A, class B>
Parser<B> skip_left(const Parser<A>& p, const Parser<B>& q) {
  return Parser<B>([p, q](Input in) -> Outcome<B> {
    auto first = p(in);
    if (!first) return first.failure();
    return q(in.at(first.next()));
  });
}

/// Sequences any number of parsers into a tuple of their values.
template <class... As>
Parser<std::tuple<As...>> seq(const Parser<As>&... ps) {
  return Parser<std::tuple<As...>>([ps...](Input in) -> Outcome<std::tuple<As...>> {
    std::tuple<std::optional<As>...> slots;
    std::size_t pos = in.pos;
    std::optional<Failure> failed;
    auto step = [&](const auto& p, auto& slot) {
      if (failed) return;
      auto r = p(in.at(pos));
      if (!r) {
        failed = r.failure();
        return;
      }
      pos = r.next();
      slot = std::move(r).value();
    };
    std::apply([&](auto&... slot) { (step(ps, slot), ...); }, slots);
    if (failed) return *failed;
    return Success<std::tuple<As...>>{std::apply([](auto&... s) { return std::tuple<As...>{std::move(*s)...}; }, slots),
                                      pos};
  });
}

namespace detail {
inline Failure merge_failures(Failure a, const Failure& b) {
  if (b.pos > a.pos) return b;
  if (a.pos > b.pos) return a;
  if (a.expected == b.expected) return a;
  a.expected += " or " + b.expected;
  return a;
}
}  // namespace detail

/// Ordered choice; q always restarts at the original position. When both
/// fail, the failure that got furthest is reported (ties are joined by "or").
template <class A>
Parser<A> alt(const Parser<A>& p, const Parser<A>& q) {
  return Parser<A>([p, q](Input in) -> Outcome<A> {
    auto first = p(in);
    if (first) return first;
    auto second = q(in);
    if (second) return second;
    return detail::merge_failures(first.failure(), second.failure());
  });
}

template <class A, class... Rest>
Parser<A> choice(const Parser<A>& first, const Parser<Rest>&... rest) {
  if constexpr (sizeof...(Rest) == 0) {
    return first;
  } else {
    return alt(first, choice(rest...));
  }
}

/// Zero or more greedy repetitions. Throws NontermError if `p` succeeds
/// without consuming input.
template <class A>
Parser<std::vector<A>> many(const Parser<A>& p) {
  return Parser<std::vector<A>>([p](Input in) -> Outcome<std::vector<A>> {
    std::vector<A> out;
    std::size_t pos = in.pos;
    while (true) {
      auto r = p(in.at(pos));
      if (!r) break;
      if (r.next() == pos) throw NontermError(p.label().empty() ? "<unlabelled>" : p.label(), pos);
      pos = r.next();
      out.push_back(std::move(r).value());
    }
    return Success<std::vector<A>>{std::move(out), pos};
  });
}

template <class A>
Parser<std::vector<A>> some(const Parser<A>& p) {
  auto rest = many(p);
  return Parser<std::vector<A>>([p, rest](Input in) -> Outcome<std::vector<A>> {
    auto first = p(in);
    if (!first) return first.failure();
    if (first.next() == in.pos) throw NontermError(p.label().empty() ? "<unlabelled>" : p.label(), in.pos);
    auto tail = rest(in.at(first.next()));
    std::vector<A> out;
    out.reserve(tail.value().size() + 1);
    out.push_back(std::move(first).value());
    for (auto& v : std::move(tail).value()) out.push_back(std::move(v));
    return Success<std::vector<A>>{std::move(out), tail.next()};
  });
}

/// Exactly `n` repetitions.
template <class A>
Parser<std::vector<A>> repeat_exact(const Parser<A>& p, std::size_t n) {
  return Parser<std::vector<A>>([p, n](Input in) -> Outcome<std::vector<A>> {
    std::vector<A> out;
    out.reserve(n);
    std::size_t pos = in.pos;
    for (std::size_t i = 0; i < n; ++i) {
      auto r = p(in.at(pos));
      if (!r) return r.failure();
      pos = r.next();
      out.push_back(std::move(r).value());
    }
    return Success<std::vector<A>>{std::move(out), pos};
  });
}

template <class A, class F>
auto map(const Parser<A>& p, F f) {
  using B = std::decay_t<std::invoke_result_t<F, const A&>>;
  return Parser<B>(
      [p, f = std::move(f)](Input in) -> Outcome<B> {
        auto r = p(in);
        if (!r) return r.failure();
        return Success<B>{f(r.value()), r.next()};
      },
      p.label());
}

template <class A, class F>
auto bind(const Parser<A>& p, F f) {
  using PB = std::decay_t<std::invoke_result_t<F, const A&>>;
  static_assert(detail::is_parser<PB>::value, "bind continuation must return a Parser");
  using B = typename PB::value_type;
  return Parser<B>([p, f = std::move(f)](Input in) -> Outcome<B> {
    auto r = p(in);
    if (!r) return r.failure();
    return f(r.value())(in.at(r.next()));
  });
}

/// p, or `dflt` without consuming anything. Never fails.
template <class A>
Parser<A> fallback(const Parser<A>& p, A dflt) {
  return Parser<A>(
      [p, dflt = std::move(dflt)](Input in) -> Outcome<A> {
        auto r = p(in);
        if (r) return r;
        return Success<A>{dflt, in.pos};
      },
      p.label());
}

/// operand (operator operand)*, folded left-associatively. Once an operator
/// matches, a missing right operand is an error.
template <class A, class Op>
Parser<A> chain_left(const Parser<A>& operand, const Parser<Op>& op) {
  return Parser<A>([operand, op](Input in) -> Outcome<A> {
    auto first = operand(in);
    if (!first) return first;
    A acc = std::move(first).value();
    std::size_t pos = first.next();
    while (true) {
      auto f = op(in.at(pos));
      if (!f) break;
      auto rhs = operand(in.at(f.next()));
      if (!rhs) return rhs.failure();  // an operator commits to a following operand
      if (rhs.next() == pos) throw NontermError(operand.label().empty() ? "<chain operand>" : operand.label(), pos);
      acc = f.value()(std::move(acc), std::move(rhs).value());
      pos = rhs.next();
    }
    return Success<A>{std::move(acc), pos};
  });
}

/// Relabels failures: the failure is reported at the position where `p`
/// started, with `label` as the sole expectation.
template <class A>
Parser<A> desc(const Parser<A>& p, std::string label) {
  if (label.empty()) throw std::invalid_argument("desc: empty label");
  return Parser<A>(
      [p, label](Input in) -> Outcome<A> {
        auto r = p(in);
        if (r) return r;
        return Failure{in.pos, label};
      },
      label);
}

/// Defers construction, for recursive grammars.
template <class F>
auto lazy(F make) {
  using P = std::decay_t<std::invoke_result_t<F>>;
  using A = typename P::value_type;
  return Parser<A>([make = std::move(make)](Input in) -> Outcome<A> { return make()(in); });
}

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

template <class A>
struct Spanned {
  A value;
  Span span;
};

/// Records the input span `p` consumed.
template <class A>
Parser<Spanned<A>> spanned(const Parser<A>& p) {
  return Parser<Spanned<A>>(
      [p](Input in) -> Outcome<Spanned<A>> {
        auto r = p(in);
        if (!r) return r.failure();
        const std::size_t next = r.next();
        return Success<Spanned<A>>{{std::move(r).value(), Span{in.pos, next}}, next};
      },
      p.label());
}

/// The text consumed by `p`, as UTF-8.
template <class A>
Parser<std::string> matched(const Parser<A>& p) {
  return Parser<std::string>(
      [p](Input in) -> Outcome<std::string> {
        auto r = p(in);
        if (!r) return r.failure();
        return Success<std::string>{utf8::encode(in.text.substr(in.pos, r.next() - in.pos)), r.next()};
      },
      p.label());
}

/// Counts invocations of `p` into `counter`; used to observe how often a
/// sub-recogniser is consulted.
template <class A>
Parser<A> counted(const Parser<A>& p, std::shared_ptr<std::atomic<std::size_t>> counter) {
  return Parser<A>(
      [p, counter = std::move(counter)](Input in) -> Outcome<A> {
        counter->fetch_add(1, std::memory_order_relaxed);
        return p(in);
      },
      p.label());
}

/// Whole-string acceptance: p must succeed and consume every codepoint.
template <class A>
Outcome<A> run_to_end(const Parser<A>& p, std::u32string_view text) {
  auto r = p(Input{text, 0});
  if (!r) return r;
  if (r.next() != text.size()) return Failure{r.next(), "end of input"};
  return r;
}

template <class A>
Outcome<A> run_to_end(const Parser<A>& p, std::string_view utf8_text) {
  const std::u32string text = utf8::decode(utf8_text);
  return run_to_end(p, std::u32string_view(text));
}

template <class A>
template <class B>
Parser<std::pair<A, B>> Parser<A>::then(const Parser<B>& q) const {
  return strtype::then(*this, q);
}

template <class A>
template <class F>
auto Parser<A>::map(F f) const {
  return strtype::map(*this, std::move(f));
}

template <class A>
template <class F>
auto Parser<A>::bind(F f) const {
  return strtype::bind(*this, std::move(f));
}

template <class A>
Parser<A> Parser<A>::fallback(A dflt) const {
  return strtype::fallback(*this, std::move(dflt));
}

template <class A>
Parser<A> Parser<A>::desc(std::string label) const {
  return strtype::desc(*this, std::move(label));
}

}  // namespace strtype
