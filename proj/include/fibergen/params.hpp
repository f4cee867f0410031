#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fibergen::params {

enum class Format { Prm, Json, Xml };
enum class Verbosity { Minimal = 0, Standard = 1, Full = 2 };

/// Format from a file extension; anything other than .json and .xml is prm.
Format format_from_extension(const std::filesystem::path& path);
const char* extension_of(Format format);  // without the dot

/// Admissible values of one entry.
class Pattern {
 public:
  enum class Kind { Bool, Integer, Double, Selection, FileNameInput, FileNameOutput, List, Anything };

  static constexpr std::int64_t kMaxInt = 2147483647;
  static constexpr std::int64_t kMaxListLength = 4294967295;

  static Pattern boolean();
  static Pattern integer(std::int64_t min = -kMaxInt - 1, std::int64_t max = kMaxInt);
  static Pattern real(double min, double max);
  static Pattern real();  // unbounded
  static Pattern selection(std::vector<std::string> choices);
  static Pattern input_file();
  static Pattern output_file();
  static Pattern list(const Pattern& element, std::int64_t min_length = 0, std::int64_t max_length = kMaxListLength,
                      std::string separator = ",");
  static Pattern anything();

  Kind kind() const noexcept { return kind_; }
  bool match(std::string_view value) const;
  /// Bracketed description, e.g. "[Selection Hex|Tet ]".
  std::string description() const;

  /// Splits a list value into its (trimmed) elements.
  std::vector<std::string> split(std::string_view value) const;

 private:
  explicit Pattern(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::int64_t int_min_ = 0, int_max_ = 0;
  double real_min_ = 0.0, real_max_ = 0.0;
  std::vector<std::string> choices_;
  std::shared_ptr<const Pattern> element_;
  std::string separator_;
};

struct Entry {
  std::string name;
  std::string value;
  std::string default_value;
  std::string documentation;
  Pattern pattern = Pattern::anything();
  int pattern_index = 0;
  Verbosity verbosity = Verbosity::Standard;
};

/// Declared parameters grouped in nested subsections, kept in declaration
/// order. Paths are subsection and entry names joined with '/'.
class ParamTree {
 public:
  ParamTree();

  /// Declares path (last component is the entry name) with a default value.
  Entry& declare(std::string_view path, std::string default_value, Pattern pattern, std::string documentation,
                 Verbosity verbosity = Verbosity::Standard);

  const Entry& entry(std::string_view path) const;
  const Entry* find(std::string_view path) const;
  bool empty() const noexcept;

  /// Validates against the entry's pattern before storing.
  void set(std::string_view path, std::string_view value);

  const std::string& get(std::string_view path) const;
  bool get_bool(std::string_view path) const;
  std::int64_t get_integer(std::string_view path) const;
  double get_double(std::string_view path) const;
  std::vector<std::string> get_list(std::string_view path) const;

  /// Renders current values; entries above the verbosity are left out.
  std::string generate(Format format, Verbosity verbosity = Verbosity::Standard) const;

  /// Overrides values found in text; everything else keeps its value.
  void parse(std::string_view text, Format format);

  /// Full path -> current value, for every declared entry.
  std::map<std::string, std::string> values() const;

  struct Node {
    std::string name;
    std::optional<Entry> entry;  // empty for subsections
    std::vector<Node> children;
  };
  const Node& root() const noexcept { return root_; }

 private:
  Node root_;
  int next_index_ = 0;
};

/// Parses text into a copy of tree and renders it in another format.
std::string convert(const ParamTree& tree, std::string_view text, Format in, Format out,
                    Verbosity verbosity = Verbosity::Full);

/// Space <-> "_20" key mangling used by the json and xml formats.
std::string mangle(std::string_view name);
std::string demangle(std::string_view key);

}  // namespace fibergen::params
