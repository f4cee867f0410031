#include "fibergen/params.hpp"

#include <algorithm>
#include <boost/property_tree/json_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fibergen/error.hpp"

namespace fibergen::params {

namespace pt = boost::property_tree;

namespace {

constexpr double kMaxDouble = std::numeric_limits<double>::max();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto slash = path.find('/', start);
    parts.push_back(path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return parts;
}

std::string format_double(double x) {
  if (x >= kMaxDouble) return "MAX_DOUBLE";
  if (x <= -kMaxDouble) return "-MAX_DOUBLE";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty() || !std::isfinite(x)) return std::nullopt;
  return x;
}

std::optional<std::int64_t> parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t x = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return x;
}

using Node = ParamTree::Node;

Node* find_child(Node& node, std::string_view name) {
  for (auto& c : node.children)
    if (c.name == name) return &c;
  return nullptr;
}

const Node* find_child(const Node& node, std::string_view name) {
  for (const auto& c : node.children)
    if (c.name == name) return &c;
  return nullptr;
}

std::string join(const std::vector<std::string>& path, std::string_view last) {
  std::string out;
  for (const auto& p : path) out += p + '/';
  out += last;
  return out;
}

void assign(Entry& e, std::string_view raw, const std::string& full_path) {
  const auto value = trim(raw);
  if (value.find('#') != std::string_view::npos)
    throw Error(Errc::PatternMismatch, "value '" + std::string(value) + "' for '" + full_path +
                                           "' contains '#', which is reserved for comments");
  if (!e.pattern.match(value))
    throw Error(Errc::PatternMismatch, "value '" + std::string(value) + "' for '" + full_path +
                                           "' does not match the pattern " + e.pattern.description());
  e.value = std::string(value);
}

bool visible(const Node& node, Verbosity v) {
  if (node.entry) return node.entry->verbosity <= v;
  return std::any_of(node.children.begin(), node.children.end(), [v](const Node& c) { return visible(c, v); });
}

std::vector<std::string> doc_lines(const std::string& doc) {
  std::vector<std::string> lines;
  std::istringstream in(doc);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

void render_prm(const Node& section, int level, Verbosity v, std::ostringstream& out) {
  const std::string indent(2 * level, ' ');
  std::size_t longest_name = 0, longest_value = 0;
  for (const auto& c : section.children)
    if (c.entry && visible(c, v)) {
      longest_name = std::max(longest_name, c.name.size());
      longest_value = std::max(longest_value, c.entry->value.size());
    }

  bool first = true;
  for (const auto& c : section.children) {
    if (!c.entry || !visible(c, v)) continue;
    if (!first) out << '\n';
    first = false;
    for (const auto& line : doc_lines(c.entry->documentation)) out << rstrip(indent + "# " + line) << '\n';
    std::string line = indent + "set " + c.name + std::string(longest_name - c.name.size() + 1, ' ') + "= " + c.entry->value;
    if (c.entry->value != c.entry->default_value)
      line += std::string(longest_value - c.entry->value.size() + 1, ' ') + "# default: " + c.entry->default_value;
    out << rstrip(std::move(line)) << '\n';
  }
  for (const auto& c : section.children) {
    if (c.entry || !visible(c, v)) continue;
    if (!first) out << '\n';
    first = false;
    out << indent << "subsection " << c.name << '\n';
    render_prm(c, level + 1, v, out);
    out << indent << "end\n";
  }
}

std::string json_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '/': out += "\\/"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned char>(ch));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

void render_json(const Node& section, int level, Verbosity v, std::ostringstream& out) {
  const std::string indent(2 * level, ' ');
  bool first = true;
  for (const auto& c : section.children) {
    if (!visible(c, v)) continue;
    if (!first) out << ",\n";
    first = false;
    out << indent << '"' << json_escape(mangle(c.name)) << "\": {\n";
    if (c.entry) {
      const std::string in = indent + "  ";
      const Entry& e = *c.entry;
      out << in << "\"value\": \"" << json_escape(e.value) << "\",\n"
          << in << "\"default_value\": \"" << json_escape(e.default_value) << "\",\n"
          << in << "\"documentation\": \"" << json_escape(e.documentation) << "\",\n"
          << in << "\"pattern\": \"" << e.pattern_index << "\",\n"
          << in << "\"pattern_description\": \"" << json_escape(e.pattern.description()) << "\"\n";
    } else {
      render_json(c, level + 1, v, out);
      out << '\n';
    }
    out << indent << '}';
  }
}

void xml_field(std::ostringstream& out, const std::string& indent, const char* tag, std::string_view text) {
  if (text.empty())
    out << indent << '<' << tag << "/>\n";
  else
    out << indent << '<' << tag << '>' << xml_escape(text) << "</" << tag << ">\n";
}

void render_xml(const Node& section, int level, Verbosity v, std::ostringstream& out) {
  const std::string indent(2 * level, ' ');
  for (const auto& c : section.children) {
    if (!visible(c, v)) continue;
    const std::string tag = mangle(c.name);
    out << indent << '<' << tag << ">\n";
    if (c.entry) {
      const std::string in = indent + "  ";
      const Entry& e = *c.entry;
      xml_field(out, in, "value", e.value);
      xml_field(out, in, "default_value", e.default_value);
      xml_field(out, in, "documentation", e.documentation);
      xml_field(out, in, "pattern", std::to_string(e.pattern_index));
      xml_field(out, in, "pattern_description", e.pattern.description());
    } else {
      render_xml(c, level + 1, v, out);
    }
    out << indent << "</" << tag << ">\n";
  }
}

void parse_prm(Node& root, std::string_view text) {
  std::vector<Node*> stack{&root};
  std::vector<std::string> path;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";

    auto keyword = [&](std::string_view kw) {
      return line.size() > kw.size() && line.substr(0, kw.size()) == kw &&
             (line[kw.size()] == ' ' || line[kw.size()] == '\t');
    };
    if (keyword("subsection")) {
      const auto name = trim(line.substr(10));
      Node* child = find_child(*stack.back(), name);
      if (!child || child->entry)
        throw Error(Errc::UnknownSubsection, where + "unknown subsection '" + join(path, name) + "'");
      stack.push_back(child);
      path.emplace_back(name);
    } else if (line == "end") {
      if (stack.size() == 1) throw Error(Errc::SyntaxError, where + "'end' without a matching subsection");
      stack.pop_back();
      path.pop_back();
    } else if (keyword("set")) {
      const auto rest = line.substr(4);
      const auto eq = rest.find('=');
      if (eq == std::string_view::npos) throw Error(Errc::SyntaxError, where + "expected 'set <name> = <value>'");
      const auto name = trim(rest.substr(0, eq));
      Node* child = find_child(*stack.back(), name);
      if (!child || !child->entry) throw Error(Errc::UnknownEntry, where + "unknown entry '" + join(path, name) + "'");
      assign(*child->entry, rest.substr(eq + 1), join(path, name));
    } else {
      throw Error(Errc::SyntaxError, where + "cannot parse '" + std::string(line) + "'");
    }
  }
  if (stack.size() > 1) throw Error(Errc::SyntaxError, "missing 'end' for subsection '" + join(path, "") + "'");
}

void read_ptree(Node& section, const pt::ptree& tree, std::vector<std::string>& path) {
  for (const auto& [key, child] : tree) {
    if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
    const std::string name = demangle(key);
    Node* node = find_child(section, name);
    if (!node) {
      if (child.get_child_optional("value"))
        throw Error(Errc::UnknownEntry, "unknown entry '" + join(path, name) + "'");
      throw Error(Errc::UnknownSubsection, "unknown subsection '" + join(path, name) + "'");
    }
    if (node->entry) {
      const auto value = child.get_child_optional("value");
      if (!value) throw Error(Errc::SyntaxError, "entry '" + join(path, name) + "' has no value field");
      assign(*node->entry, value->data(), join(path, name));
    } else {
      if (child.empty() && !trim(child.data()).empty())
        throw Error(Errc::SyntaxError, "subsection '" + join(path, name) + "' holds a plain value");
      path.push_back(name);
      read_ptree(*node, child, path);
      path.pop_back();
    }
  }
}

void collect(const Node& section, const std::string& prefix, std::map<std::string, std::string>& out) {
  for (const auto& c : section.children) {
    const std::string path = prefix.empty() ? c.name : prefix + '/' + c.name;
    if (c.entry)
      out.emplace(path, c.entry->value);
    else
      collect(c, path, out);
  }
}

}  // namespace

Format format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json") return Format::Json;
  if (ext == ".xml") return Format::Xml;
  return Format::Prm;
}

const char* extension_of(Format format) {
  switch (format) {
    case Format::Json: return "json";
    case Format::Xml: return "xml";
    case Format::Prm: break;
  }
  return "prm";
}

std::string mangle(std::string_view name) {
  std::string out;
  for (char ch : name) {
    if (ch == ' ')
      out += "_20";
    else
      out += ch;
  }
  return out;
}

std::string demangle(std::string_view key) {
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key.substr(i, 3) == "_20") {
      out += ' ';
      i += 2;
    } else {
      out += key[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------- Pattern

Pattern Pattern::boolean() { return Pattern(Kind::Bool); }

Pattern Pattern::integer(std::int64_t min, std::int64_t max) {
  if (min > max) throw std::invalid_argument("integer pattern with min > max");
  Pattern p(Kind::Integer);
  p.int_min_ = min;
  p.int_max_ = max;
  return p;
}

Pattern Pattern::real(double min, double max) {
  if (!(min <= max)) throw std::invalid_argument("double pattern with min > max");
  Pattern p(Kind::Double);
  p.real_min_ = min;
  p.real_max_ = max;
  return p;
}

Pattern Pattern::real() { return real(-kMaxDouble, kMaxDouble); }

Pattern Pattern::selection(std::vector<std::string> choices) {
  if (choices.empty()) throw std::invalid_argument("selection pattern without choices");
  Pattern p(Kind::Selection);
  p.choices_ = std::move(choices);
  return p;
}

Pattern Pattern::input_file() { return Pattern(Kind::FileNameInput); }
Pattern Pattern::output_file() { return Pattern(Kind::FileNameOutput); }
Pattern Pattern::anything() { return Pattern(Kind::Anything); }

Pattern Pattern::list(const Pattern& element, std::int64_t min_length, std::int64_t max_length, std::string separator) {
  if (min_length > max_length || min_length < 0) throw std::invalid_argument("list pattern with bad length bounds");
  if (separator.empty()) throw std::invalid_argument("list pattern with empty separator");
  Pattern p(Kind::List);
  p.element_ = std::make_shared<const Pattern>(element);
  p.int_min_ = min_length;
  p.int_max_ = max_length;
  p.separator_ = std::move(separator);
  return p;
}

std::vector<std::string> Pattern::split(std::string_view value) const {
  std::vector<std::string> parts;
  value = trim(value);
  if (value.empty()) return parts;
  const bool blank_separator = trim(separator_).empty();
  std::size_t start = 0;
  while (true) {
    const auto at = value.find(separator_, start);
    const auto piece = trim(value.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (!(blank_separator && piece.empty())) parts.emplace_back(piece);
    if (at == std::string_view::npos) break;
    start = at + separator_.size();
  }
  return parts;
}

bool Pattern::match(std::string_view raw) const {
  const auto value = trim(raw);
  switch (kind_) {
    case Kind::Bool: return value == "true" || value == "false";
    case Kind::Integer: {
      const auto x = parse_integer(value);
      return x && *x >= int_min_ && *x <= int_max_;
    }
    case Kind::Double: {
      const auto x = parse_double(value);
      return x && *x >= real_min_ && *x <= real_max_;
    }
    case Kind::Selection: return std::find(choices_.begin(), choices_.end(), value) != choices_.end();
    case Kind::List: {
      const auto parts = split(value);
      const auto n = static_cast<std::int64_t>(parts.size());
      if (n < int_min_ || n > int_max_) return false;
      return std::all_of(parts.begin(), parts.end(), [this](const std::string& s) { return element_->match(s); });
    }
    case Kind::FileNameInput:
    case Kind::FileNameOutput:
    case Kind::Anything: return true;
  }
  return false;
}

std::string Pattern::description() const {
  switch (kind_) {
    case Kind::Bool: return "[Bool]";
    case Kind::Integer:
      if (int_min_ == -kMaxInt - 1 && int_max_ == kMaxInt) return "[Integer]";
      return "[Integer range " + std::to_string(int_min_) + "..." + std::to_string(int_max_) + " (inclusive)]";
    case Kind::Double:
      return "[Double " + format_double(real_min_) + "..." + format_double(real_max_) + " (inclusive)]";
    case Kind::Selection: {
      std::string s = "[Selection ";
      for (std::size_t i = 0; i < choices_.size(); ++i) s += (i ? "|" : "") + choices_[i];
      return s + " ]";
    }
    case Kind::FileNameInput: return "[FileName (Type: input)]";
    case Kind::FileNameOutput: return "[FileName (Type: output)]";
    case Kind::List: {
      std::string s = "[List of <" + element_->description() + "> of length " + std::to_string(int_min_) + "..." +
                      std::to_string(int_max_) + " (inclusive)";
      if (separator_ != ",") s += " separated by <" + separator_ + ">";
      return s + "]";
    }
    case Kind::Anything: return "[Anything]";
  }
  return {};
}

// -------------------------------------------------------------- ParamTree

ParamTree::ParamTree() = default;

Entry& ParamTree::declare(std::string_view path, std::string default_value, Pattern pattern, std::string documentation,
                          Verbosity verbosity) {
  const auto parts = split_path(path);
  for (auto p : parts)
    if (trim(p).empty() || trim(p) != p)
      throw Error(Errc::EmptyName, "invalid parameter path '" + std::string(path) + "'");
  Node* node = &root_;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    Node* child = find_child(*node, parts[i]);
    if (child && child->entry)
      throw Error(Errc::DuplicateEntry, "'" + std::string(parts[i]) + "' is already declared as an entry");
    if (!child) {
      node->children.push_back(Node{std::string(parts[i]), std::nullopt, {}});
      child = &node->children.back();
    }
    node = child;
  }
  if (find_child(*node, parts.back()))
    throw Error(Errc::DuplicateEntry, "parameter '" + std::string(path) + "' is already declared");
  if (!pattern.match(default_value))
    throw std::invalid_argument("default '" + default_value + "' of '" + std::string(path) + "' does not match " +
                                pattern.description());

  Entry e;
  e.name = std::string(parts.back());
  e.value = default_value;
  e.default_value = std::move(default_value);
  e.documentation = std::move(documentation);
  e.pattern = std::move(pattern);
  e.pattern_index = next_index_++;
  e.verbosity = verbosity;
  node->children.push_back(Node{e.name, std::move(e), {}});
  return *node->children.back().entry;
}

const Entry* ParamTree::find(std::string_view path) const {
  const Node* node = &root_;
  for (auto part : split_path(path)) {
    node = find_child(*node, part);
    if (!node) return nullptr;
  }
  return node->entry ? &*node->entry : nullptr;
}

const Entry& ParamTree::entry(std::string_view path) const {
  const Entry* e = find(path);
  if (!e) throw Error(Errc::UnknownEntry, "unknown entry '" + std::string(path) + "'");
  return *e;
}

bool ParamTree::empty() const noexcept { return root_.children.empty(); }

void ParamTree::set(std::string_view path, std::string_view value) {
  auto& e = const_cast<Entry&>(entry(path));
  assign(e, value, std::string(path));
}

const std::string& ParamTree::get(std::string_view path) const { return entry(path).value; }

bool ParamTree::get_bool(std::string_view path) const {
  const auto& e = entry(path);
  if (e.pattern.kind() != Pattern::Kind::Bool) throw std::logic_error(std::string(path) + " is not a Bool entry");
  return e.value == "true";
}

std::int64_t ParamTree::get_integer(std::string_view path) const {
  const auto x = parse_integer(trim(get(path)));
  if (!x) throw std::logic_error(std::string(path) + " does not hold an integer");
  return *x;
}

double ParamTree::get_double(std::string_view path) const {
  const auto x = parse_double(trim(get(path)));
  if (!x) throw std::logic_error(std::string(path) + " does not hold a number");
  return *x;
}

std::vector<std::string> ParamTree::get_list(std::string_view path) const {
  const auto& e = entry(path);
  if (e.pattern.kind() != Pattern::Kind::List) throw std::logic_error(std::string(path) + " is not a List entry");
  return e.pattern.split(e.value);
}

std::string ParamTree::generate(Format format, Verbosity verbosity) const {
  std::ostringstream out;
  switch (format) {
    case Format::Prm:
      out << "# Listing of Parameters\n# ---------------------\n";
      render_prm(root_, 0, verbosity, out);
      break;
    case Format::Json:
      if (!visible(root_, verbosity)) {
        out << "{}\n";
        break;
      }
      out << "{\n";
      render_json(root_, 1, verbosity, out);
      out << "\n}\n";
      break;
    case Format::Xml:
      out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
      if (!visible(root_, verbosity)) {
        out << "<ParameterHandler/>\n";
        break;
      }
      out << "<ParameterHandler>\n";
      render_xml(root_, 1, verbosity, out);
      out << "</ParameterHandler>\n";
      break;
  }
  return out.str();
}

void ParamTree::parse(std::string_view text, Format format) {
  Node updated = root_;
  std::vector<std::string> path;
  switch (format) {
    case Format::Prm: parse_prm(updated, text); break;
    case Format::Json: {
      if (trim(text).empty()) break;
      pt::ptree tree;
      std::istringstream in{std::string(text)};
      try {
        pt::read_json(in, tree);
      } catch (const pt::json_parser_error& e) {
        throw Error(Errc::SyntaxError, "malformed json (line " + std::to_string(e.line()) + "): " + e.message());
      }
      read_ptree(updated, tree, path);
      break;
    }
    case Format::Xml: {
      if (trim(text).empty()) break;
      pt::ptree tree;
      std::istringstream in{std::string(text)};
      try {
        pt::read_xml(in, tree, pt::xml_parser::no_comments);
      } catch (const pt::xml_parser_error& e) {
        throw Error(Errc::SyntaxError, "malformed xml (line " + std::to_string(e.line()) + "): " + e.message());
      }
      const pt::ptree* handler = nullptr;
      for (const auto& [key, child] : tree) {
        if (key == "ParameterHandler" && !handler)
          handler = &child;
        else if (key != "<xmlcomment>")
          throw Error(Errc::SyntaxError, "xml root element must be a single <ParameterHandler>, found <" + key + ">");
      }
      if (!handler) throw Error(Errc::SyntaxError, "xml root element <ParameterHandler> is missing");
      read_ptree(updated, *handler, path);
      break;
    }
  }
  root_ = std::move(updated);
}

std::map<std::string, std::string> ParamTree::values() const {
  std::map<std::string, std::string> out;
  collect(root_, "", out);
  return out;
}

std::string convert(const ParamTree& tree, std::string_view text, Format in, Format out, Verbosity verbosity) {
  ParamTree copy = tree;
  copy.parse(text, in);
  return copy.generate(out, verbosity);
}

}  // namespace fibergen::params
