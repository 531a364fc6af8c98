#pragma once

// The strtype command line: batch validation, normalisation, field
// extraction, equality and narrowing against registered types.
//
// Machine output is one JSON object per input line. Exit status is 0 when
// every line was accepted, 1 when any was rejected, 2 on usage or setup
// errors.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "strtype/builtins.hpp"
#include "strtype/ops.hpp"
#include "strtype/safestring.hpp"

namespace strtype::cli {

inline constexpr int kAllOk = 0;
inline constexpr int kSomeRejected = 1;
inline constexpr int kUsage = 2;

using Json = nlohmann::ordered_json;

namespace detail {

struct Usage {
  std::string message;
};

inline Json field_json(const FieldValue& f) {
  return std::visit([](const auto& v) { return Json(v); }, f);
}

inline std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

inline Json error_json(const ParseError& e) { return Json{{"pos", e.pos}, {"expected", e.expected}}; }

/// What went wrong with a line that could not be accepted. Errors that are
/// not about the input's position are reported at 0.
inline ParseError line_error(const OpError& e) {
  if (e.parse) return *e.parse;
  return ParseError{0, e.message(), ""};
}

// Monolithic types from STRTYPE_TYPES: one file per type, the name on the
// first line and the pattern on the second.
inline void load_type_dir(Registry& registry, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Usage{"STRTYPE_TYPES: not a directory: " + dir};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) throw Usage{"STRTYPE_TYPES: " + ec.message()};
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream f(path);
    std::string name, pattern;
    if (!f || !std::getline(f, name) || !std::getline(f, pattern)) {
      throw Usage{"type definition needs a name line and a pattern line: " + path.string()};
    }
    if (!name.empty() && name.back() == '\r') name.pop_back();
    if (!pattern.empty() && pattern.back() == '\r') pattern.pop_back();
    auto d = monolithic(name, pattern);
    if (!d) throw Usage{path.string() + ": " + d.error().message()};
    auto h = registry.register_type(std::move(d).value());
    if (!h) throw Usage{path.string() + ": " + h.error().message()};
  }
}

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

class Reporter {
 public:
  Reporter(std::ostream& out, bool human) : out_(out), human_(human) {}

  void accepted(const std::string& input, const std::string& type, const Json& fields, const std::string& normalized) {
    if (!human_) {
      Json j{{"input", input}, {"typeName", type}, {"ok", true}};
      if (!fields.is_null()) j["fields"] = fields;
      j["normalized"] = normalized;
      out_ << dump(j) << '\n';
      return;
    }
    out_ << "ok    " << input << "  =>  " << normalized;
    if (fields.is_object()) {
      for (const auto& [k, v] : fields.items()) out_ << "  " << k << '=' << (v.is_string() ? v.get<std::string>() : dump(v));
    }
    out_ << '\n';
  }

  void rejected(const std::string& input, const std::string& type, const ParseError& e) {
    ok_ = false;
    if (!human_) {
      Json j{{"input", input}, {"typeName", type}, {"ok", false}, {"error", error_json(e)}};
      out_ << dump(j) << '\n';
      return;
    }
    out_ << "FAIL  " << input << '\n'
         << "      " << std::string(e.pos, ' ') << "^ expected " << e.expected << " (" << type << ", position "
         << e.pos << ")\n";
  }

  int exit_code() const { return ok_ ? kAllOk : kSomeRejected; }

 private:
  std::ostream& out_;
  bool human_;
  bool ok_ = true;
};

inline Json all_fields(const SafeStringDescriptor& d, const SafeStringValue& v) {
  Json j = Json::object();
  for (const auto& name : d.field_names) {
    if (auto f = field_of(v.structure(), name)) j[name] = field_json(*f);
  }
  return j;
}

inline const SafeStringDescriptor& require_type(const Registry& r, const std::string& name) {
  const SafeStringDescriptor* d = r.find(name);
  if (!d) throw Usage{"unknown type: " + name};
  return *d;
}

inline std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ',';
    out += x;
  }
  return out;
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Check strings against structured string types"};
  app.name("strtype");
  app.require_subcommand(1);

  std::string type = std::string(kStringType), from, to, field, mode = "strict", file;
  bool human = false;
  std::vector<std::string> inputs;

  auto common = [&](CLI::App* sub, bool needs_type) {
    auto* t = sub->add_option("--type", type, "Type name");
    if (needs_type) t->required();
    sub->add_option("--file", file, "Read inputs from this file, one per line");
    sub->add_flag("--human", human, "Aligned text output");
    sub->add_option("inputs", inputs, "Inputs (default: --file, else stdin)");
  };

  auto* validate = app.add_subcommand("validate", "Accept or reject each input");
  common(validate, true);
  auto* normalize_cmd = app.add_subcommand("normalize", "Print the canonical form of each input");
  common(normalize_cmd, true);
  auto* extract = app.add_subcommand("extract", "Print one field of each input");
  common(extract, true);
  extract->add_option("--field", field, "Field name")->required();
  auto* eq = app.add_subcommand("eq", "Compare two inputs");
  common(eq, false);
  eq->add_option("--mode", mode, "raw, weak or strict")->check(CLI::IsMember({"raw", "weak", "strict"}));
  auto* narrow = app.add_subcommand("narrow", "Re-type inputs as a subtype");
  narrow->add_option("--from", from, "Source type")->required();
  narrow->add_option("--to", to, "Target type")->required();
  narrow->add_option("--file", file, "Read inputs from this file, one per line");
  narrow->add_flag("--human", human, "Aligned text output");
  narrow->add_option("inputs", inputs, "Inputs (default: --file, else stdin)");
  auto* list = app.add_subcommand("list-types", "List registered types");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsage;
  }

  try {
    Registry registry = builtin_registry();
    if (const char* dir = std::getenv("STRTYPE_TYPES"); dir && *dir) detail::load_type_dir(registry, dir);

    if (list->parsed()) {
      for (const SafeStringDescriptor* d : registry.types()) {
        std::vector<std::string> overrides(d->overridden_fields.begin(), d->overridden_fields.end());
        out << d->type_name << " parent=" << (d->parent ? *d->parent : "-") << " overrides=[" << detail::join(overrides)
            << "] fields=[" << detail::join(d->field_names) << "]\n";
      }
      return kAllOk;
    }

    if (inputs.empty()) {
      if (!file.empty()) {
        std::ifstream f(file);
        if (!f) throw detail::Usage{"cannot read " + file};
        inputs = detail::read_lines(f);
      } else {
        inputs = detail::read_lines(in);
      }
    }

    detail::Reporter report(out, human);

    if (narrow->parsed()) {
      detail::require_type(registry, from);
      detail::require_type(registry, to);
      if (!registry.is_ancestor_or_self(from, to)) throw detail::Usage{to + " is not a subtype of " + from};
      for (const auto& line : inputs) {
        auto v = registry.from_raw(from, line).and_then([&](const SafeStringValue& x) { return registry.narrow(x, to); });
        if (!v) {
          report.rejected(line, to, detail::line_error(v.error()));
        } else {
          report.accepted(line, to, Json(), cast(*v));
        }
      }
      return report.exit_code();
    }

    const SafeStringDescriptor& d = detail::require_type(registry, type);

    if (eq->parsed()) {
      if (inputs.size() != 2) throw detail::Usage{"eq takes exactly two inputs"};
      auto a = registry.from_raw(type, inputs[0]);
      auto b = registry.from_raw(type, inputs[1]);
      if (!a || !b) {
        if (!a) report.rejected(inputs[0], type, detail::line_error(a.error()));
        if (!b) report.rejected(inputs[1], type, detail::line_error(b.error()));
        return report.exit_code();
      }
      const bool equal = mode == "raw" ? raw_eq(*a, *b) : mode == "weak" ? weak_eq(*a, *b) : strict_eq(*a, *b);
      Json fields{{"other", inputs[1]}, {"mode", mode}, {"equal", equal}};
      report.accepted(inputs[0], type, fields, cast(*a));
      return report.exit_code();
    }

    if (extract->parsed() &&
        std::find(d.field_names.begin(), d.field_names.end(), field) == d.field_names.end()) {
      throw detail::Usage{type + " has no field " + field};
    }

    for (const auto& line : inputs) {
      auto v = registry.from_raw(type, line);
      if (!v) {
        report.rejected(line, type, detail::line_error(v.error()));
        continue;
      }
      Json fields;
      if (extract->parsed()) {
        auto f = field_of(v->structure(), field);
        fields = Json{{field, f ? detail::field_json(*f) : Json()}};
      } else if (validate->parsed()) {
        fields = detail::all_fields(d, *v);
      }
      report.accepted(line, type, fields, normalize(*v));
    }
    return report.exit_code();
  } catch (const detail::Usage& u) {
    err << "strtype: " << u.message << '\n';
    return kUsage;
  }
}

}  // namespace strtype::cli
