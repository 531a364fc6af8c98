#pragma once

// A small regular-expression engine for token-level recognisers.
//
// Supported: literals, '.', escapes (\d \w \s and their negations, escaped
// punctuation, \t \n \r), bracket classes with ranges and negation, groups
// (plain or "(?:"), alternation, and the quantifiers * + ? {n} {n,} {n,m}.
// Not supported: anchors, backreferences, lookaround, lazy or possessive
// quantifiers. Matching is anchored at the given position and returns the
// longest match, computed by Thompson NFA simulation (no backtracking).

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "strtype/utf8.hpp"

namespace strtype {

class PatternError : public std::invalid_argument {
 public:
  PatternError(std::string message, std::size_t offset)
      : std::invalid_argument(message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

namespace pattern_detail {

struct CharSet {
  std::vector<std::pair<char32_t, char32_t>> ranges;
  bool negated = false;

  bool contains(char32_t c) const {
    bool hit = false;
    for (const auto& [lo, hi] : ranges) {
      if (c >= lo && c <= hi) {
        hit = true;
        break;
      }
    }
    return hit != negated;
  }
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct SetNode {
  CharSet set;
};
struct ConcatNode {
  std::vector<NodePtr> items;
};
struct AltNode {
  std::vector<NodePtr> options;
};
struct RepeatNode {
  NodePtr body;
  int min = 0;
  int max = -1;  // -1: unbounded
};

struct Node {
  std::variant<SetNode, ConcatNode, AltNode, RepeatNode> v;
};

inline constexpr int kMaxCount = 1000;

class Reader {
 public:
  explicit Reader(std::string_view source) : text_(utf8::decode(source)) {}

  NodePtr parse() {
    auto node = alternation();
    if (pos_ != text_.size()) {
      throw PatternError(text_[pos_] == U')' ? "unbalanced ')'" : "unexpected character", pos_);
    }
    return node;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char32_t peek() const { return text_[pos_]; }

  NodePtr alternation() {
    std::vector<NodePtr> options{concatenation()};
    while (!at_end() && peek() == U'|') {
      ++pos_;
      options.push_back(concatenation());
    }
    if (options.size() == 1) return options.front();
    return std::make_shared<const Node>(Node{AltNode{std::move(options)}});
  }

  NodePtr concatenation() {
    std::vector<NodePtr> items;
    while (!at_end() && peek() != U'|' && peek() != U')') {
      items.push_back(quantified());
    }
    return std::make_shared<const Node>(Node{ConcatNode{std::move(items)}});
  }

  NodePtr quantified() {
    auto atom_node = atom();
    while (!at_end()) {
      const std::size_t start = pos_;
      int min = 0;
      int max = -1;
      switch (peek()) {
        case U'*':
          ++pos_;
          break;
        case U'+':
          ++pos_;
          min = 1;
          break;
        case U'?':
          ++pos_;
          max = 1;
          break;
        case U'{':
          ++pos_;
          std::tie(min, max) = counts(start);
          break;
        default:
          return atom_node;
      }
      if (!at_end() && (peek() == U'?' || peek() == U'+')) {
        throw PatternError("lazy and possessive quantifiers are not supported", pos_);
      }
      atom_node = std::make_shared<const Node>(Node{RepeatNode{atom_node, min, max}});
    }
    return atom_node;
  }

  int number(std::size_t start) {
    if (at_end() || peek() < U'0' || peek() > U'9') throw PatternError("expected a repetition count", pos_);
    long value = 0;
    while (!at_end() && peek() >= U'0' && peek() <= U'9') {
      value = value * 10 + static_cast<long>(peek() - U'0');
      if (value > kMaxCount) throw PatternError("repetition count too large", start);
      ++pos_;
    }
    return static_cast<int>(value);
  }

  std::pair<int, int> counts(std::size_t start) {
    const int min = number(start);
    int max = min;
    if (!at_end() && peek() == U',') {
      ++pos_;
      max = (!at_end() && peek() == U'}') ? -1 : number(start);
    }
    if (at_end() || peek() != U'}') throw PatternError("unterminated repetition", start);
    ++pos_;
    if (max != -1 && max < min) throw PatternError("repetition bounds out of order", start);
    return {min, max};
  }

  static NodePtr set_node(CharSet set) { return std::make_shared<const Node>(Node{SetNode{std::move(set)}}); }

  NodePtr atom() {
    const std::size_t start = pos_;
    const char32_t c = peek();
    switch (c) {
      case U'(': {
        ++pos_;
        if (!at_end() && peek() == U'?') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == U':') {
            pos_ += 2;
          } else {
            throw PatternError("lookaround and named groups are not supported", pos_);
          }
        }
        auto inner = alternation();
        if (at_end() || peek() != U')') throw PatternError("unbalanced '('", start);
        ++pos_;
        return inner;
      }
      case U'[':
        return set_node(bracket());
      case U'.':
        ++pos_;
        return set_node(CharSet{{}, true});
      case U'\\':
        return set_node(escape());
      case U'^':
      case U'$':
        throw PatternError("anchors are not supported; matching is anchored at the current position", pos_);
      case U'*':
      case U'+':
      case U'?':
      case U'{':
        throw PatternError("quantifier without operand", pos_);
      default:
        ++pos_;
        return set_node(CharSet{{{c, c}}, false});
    }
  }

  // Consumes an escape starting at '\\'.
  CharSet escape() {
    const std::size_t start = pos_;
    ++pos_;
    if (at_end()) throw PatternError("dangling escape", start);
    const char32_t c = text_[pos_++];
    auto single = [](char32_t ch) { return CharSet{{{ch, ch}}, false}; };
    switch (c) {
      case U'd':
        return CharSet{{{U'0', U'9'}}, false};
      case U'D':
        return CharSet{{{U'0', U'9'}}, true};
      case U'w':
        return CharSet{{{U'0', U'9'}, {U'a', U'z'}, {U'A', U'Z'}, {U'_', U'_'}}, false};
      case U'W':
        return CharSet{{{U'0', U'9'}, {U'a', U'z'}, {U'A', U'Z'}, {U'_', U'_'}}, true};
      case U's':
        return CharSet{{{U' ', U' '}, {U'\t', U'\r'}}, false};
      case U'S':
        return CharSet{{{U' ', U' '}, {U'\t', U'\r'}}, true};
      case U't':
        return single(U'\t');
      case U'n':
        return single(U'\n');
      case U'r':
        return single(U'\r');
      default:
        break;
    }
    const bool alnum = (c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
    if (alnum) {
      throw PatternError(c >= U'1' && c <= U'9' ? "backreferences are not supported" : "unsupported escape", start);
    }
    return single(c);
  }

  CharSet bracket() {
    const std::size_t start = pos_;
    ++pos_;
    CharSet set;
    if (!at_end() && peek() == U'^') {
      set.negated = true;
      ++pos_;
    }
    bool first = true;
    while (true) {
      if (at_end()) throw PatternError("unterminated character class", start);
      if (peek() == U']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      std::optional<char32_t> lo = class_char(set);
      if (!lo) continue;  // a shorthand class was merged
      // "x-y" forms a range unless the dash is last; a dash right after a
      // completed range is literal.
      if (pos_ + 1 < text_.size() && peek() == U'-' && text_[pos_ + 1] != U']') {
        ++pos_;
        const std::size_t range_at = pos_;
        std::optional<char32_t> hi = class_char(set);
        if (!hi) throw PatternError("shorthand class cannot end a range", range_at);
        if (*hi < *lo) throw PatternError("character range out of order", range_at);
        set.ranges.emplace_back(*lo, *hi);
      } else {
        set.ranges.emplace_back(*lo, *lo);
      }
    }
    return set;
  }

  // Shorthand escapes (\d, \w, \s) add their ranges to `set` directly.
  std::optional<char32_t> class_char(CharSet& set) {
    if (peek() != U'\\') return text_[pos_++];
    const std::size_t start = pos_;
    CharSet esc = escape();
    if (!esc.negated && esc.ranges.size() == 1 && esc.ranges[0].first == esc.ranges[0].second) {
      return esc.ranges[0].first;
    }
    if (esc.negated) throw PatternError("negated shorthand inside a class is not supported", start);
    set.ranges.insert(set.ranges.end(), esc.ranges.begin(), esc.ranges.end());
    return std::nullopt;
  }

  std::u32string text_;
  std::size_t pos_ = 0;
};

struct State {
  enum class Kind { kSet, kSplit, kMatch } kind = Kind::kMatch;
  CharSet set;
  int out = -1;
  int out2 = -1;
};

class Compiler {
 public:
  std::vector<State> states;

  // Every fragment ends in an epsilon node whose `out` is patched later.
  struct Fragment {
    int start;
    int end;
  };

  int add(State s) {
    states.push_back(std::move(s));
    return static_cast<int>(states.size()) - 1;
  }

  int epsilon() { return add(State{State::Kind::kSplit, {}, -1, -1}); }

  Fragment compile(const Node& node) {
    return std::visit([this](const auto& n) { return compile_node(n); }, node.v);
  }

  Fragment compile_node(const SetNode& n) {
    const int end = epsilon();
    const int start = add(State{State::Kind::kSet, n.set, end, -1});
    return {start, end};
  }

  Fragment compile_node(const ConcatNode& n) {
    if (n.items.empty()) {
      const int e = epsilon();
      return {e, e};
    }
    Fragment first = compile(*n.items.front());
    int end = first.end;
    for (std::size_t i = 1; i < n.items.size(); ++i) {
      Fragment next = compile(*n.items[i]);
      states[static_cast<std::size_t>(end)].out = next.start;
      end = next.end;
    }
    return {first.start, end};
  }

  Fragment compile_node(const AltNode& n) {
    const int end = epsilon();
    int start = -1;
    int prev_split = -1;
    for (std::size_t i = 0; i < n.options.size(); ++i) {
      Fragment f = compile(*n.options[i]);
      states[static_cast<std::size_t>(f.end)].out = end;
      if (i + 1 == n.options.size()) {
        if (prev_split == -1) {
          start = f.start;
        } else {
          states[static_cast<std::size_t>(prev_split)].out2 = f.start;
        }
      } else {
        const int split = add(State{State::Kind::kSplit, {}, f.start, -1});
        if (prev_split == -1) {
          start = split;
        } else {
          states[static_cast<std::size_t>(prev_split)].out2 = split;
        }
        prev_split = split;
      }
    }
    return {start, end};
  }

  Fragment compile_node(const RepeatNode& n) {
    const int head = epsilon();
    int tail = head;
    for (int i = 0; i < n.min; ++i) {
      Fragment f = compile(*n.body);
      states[static_cast<std::size_t>(tail)].out = f.start;
      tail = f.end;
    }
    if (n.max == -1) {
      Fragment f = compile(*n.body);
      const int exit = epsilon();
      const int loop = add(State{State::Kind::kSplit, {}, f.start, exit});
      states[static_cast<std::size_t>(tail)].out = loop;
      states[static_cast<std::size_t>(f.end)].out = loop;
      return {head, exit};
    }
    const int exit = epsilon();
    for (int i = n.min; i < n.max; ++i) {
      Fragment f = compile(*n.body);
      const int split = add(State{State::Kind::kSplit, {}, f.start, exit});
      states[static_cast<std::size_t>(tail)].out = split;
      tail = f.end;
    }
    states[static_cast<std::size_t>(tail)].out = exit;
    return {head, exit};
  }
};

}  // namespace pattern_detail

/// A compiled token pattern. Immutable and cheap to copy.
class Pattern {
 public:
  /// Throws PatternError when the source uses unsupported syntax.
  static Pattern compile(std::string_view source) {
    pattern_detail::Reader reader(source);
    pattern_detail::NodePtr root = reader.parse();
    pattern_detail::Compiler compiler;
    auto frag = compiler.compile(*root);
    const int match = compiler.add(pattern_detail::State{});
    compiler.states[static_cast<std::size_t>(frag.end)].out = match;
    return Pattern(std::string(source), frag.start, std::move(compiler.states));
  }

  const std::string& source() const noexcept { return impl_->source; }

  /// Length of the longest match of this pattern starting at `pos`, or
  /// nullopt when no prefix (not even the empty one) matches.
  std::optional<std::size_t> longest_match(std::u32string_view text, std::size_t pos) const {
    const auto& states = impl_->states;
    std::vector<int> current;
    std::vector<int> next;
    std::vector<std::size_t> mark(states.size(), 0);
    std::size_t generation = 1;
    std::optional<std::size_t> best;

    auto add = [&](auto& self, std::vector<int>& list, int s) -> void {
      if (s < 0) return;
      auto& m = mark[static_cast<std::size_t>(s)];
      if (m == generation) return;
      m = generation;
      const auto& st = states[static_cast<std::size_t>(s)];
      if (st.kind == pattern_detail::State::Kind::kSplit) {
        self(self, list, st.out);
        self(self, list, st.out2);
      } else {
        list.push_back(s);
      }
    };

    add(add, current, impl_->start);
    for (std::size_t i = pos;; ++i) {
      for (int s : current) {
        if (states[static_cast<std::size_t>(s)].kind == pattern_detail::State::Kind::kMatch) {
          best = i - pos;
          break;
        }
      }
      if (i >= text.size() || current.empty()) break;
      ++generation;
      next.clear();
      const char32_t c = text[i];
      for (int s : current) {
        const auto& st = states[static_cast<std::size_t>(s)];
        if (st.kind == pattern_detail::State::Kind::kSet && st.set.contains(c)) add(add, next, st.out);
      }
      std::swap(current, next);
    }
    return best;
  }

 private:
  struct Impl {
    std::string source;
    int start;
    std::vector<pattern_detail::State> states;
  };

  Pattern(std::string source, int start, std::vector<pattern_detail::State> states)
      : impl_(std::make_shared<const Impl>(Impl{std::move(source), start, std::move(states)})) {}

  std::shared_ptr<const Impl> impl_;
};

}  // namespace strtype
