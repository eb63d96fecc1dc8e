#include "contactk/cli/model_file.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "contactk/error.hpp"
#include "contactk/symexpr/parser.hpp"

namespace contactk::cli {

namespace {

enum class Section { Top, Parameters, Simulate };

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i;
}

std::size_t trim_end(std::string_view s, std::size_t end) {
  while (end > 0 && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return end;
}

class Reader {
 public:
  Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  ModelFile run() {
    ModelFile out;
    out.source = source_;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      const std::size_t nl = text_.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text_.size() : nl;
      ++line_no;
      handle_line(text_.substr(pos, end - pos), line_no, out);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finish(out);
    return out;
  }

 private:
  [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& message) const {
    throw InputError(located_message(source_, line, column, message));
  }

  double number(const Located& v) const {
    const std::string s = v.text;
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(d)) {
      fail(v.line, v.column, "expected a finite number, found '" + s + "'");
    }
    return d;
  }

  void handle_line(std::string_view raw, std::size_t line_no, ModelFile& out) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::size_t begin = skip_space(line, 0);
    const std::size_t end = trim_end(line, line.size());
    if (begin >= end) return;
    const std::string_view body = line.substr(begin, end - begin);

    if (body.front() == '[') {
      if (body.back() != ']') fail(line_no, begin + 1, "unterminated section header");
      const std::string name(body.substr(1, body.size() - 2));
      if (name == "parameters") {
        section_ = Section::Parameters;
      } else if (name == "simulate") {
        section_ = Section::Simulate;
        if (!out.simulate) out.simulate.emplace();
      } else {
        fail(line_no, begin + 1, "unknown section '" + name + "' (expected parameters or simulate)");
      }
      if (!seen_sections_.insert(name).second) fail(line_no, begin + 1, "duplicate section [" + name + "]");
      return;
    }

    const std::size_t eq = line.find('=', begin);
    if (eq == std::string_view::npos) fail(line_no, begin + 1, "expected 'key = value'");
    const std::size_t key_end = trim_end(line, eq);
    const std::string key(line.substr(begin, key_end - begin));
    if (!is_identifier(key)) fail(line_no, begin + 1, "invalid key '" + key + "'");
    const std::size_t vbegin = skip_space(line, eq + 1);
    const std::size_t vend = trim_end(line, line.size());
    if (vbegin >= vend) fail(line_no, eq + 2, "missing value for '" + key + "'");
    const Located value{std::string(line.substr(vbegin, vend - vbegin)), line_no, vbegin + 1};

    switch (section_) {
      case Section::Top: top_entry(key, value, out); break;
      case Section::Parameters: parameter_entry(key, value, out); break;
      case Section::Simulate: simulate_entry(key, value, out); break;
    }
  }

  void once(const std::string& key, const Located& v, const std::string& scope) {
    if (!seen_keys_.insert(scope + "." + key).second) fail(v.line, v.column, "duplicate key '" + key + "'");
  }

  void top_entry(const std::string& key, const Located& v, ModelFile& out) {
    if (key == "primary") {
      out.primaries.push_back(v);
      return;
    }
    once(key, v, "top");
    if (key == "name") {
      out.name = v.text;
    } else if (key == "coordinates") {
      std::size_t start = 0;
      const std::string& t = v.text;
      while (start <= t.size()) {
        const std::size_t comma = t.find(',', start);
        const std::size_t stop = comma == std::string::npos ? t.size() : comma;
        const std::size_t b = skip_space(t, start);
        const std::size_t e = trim_end(t, stop);
        const std::string name = b < e ? t.substr(b, e - b) : std::string();
        if (!is_identifier(name)) fail(v.line, v.column + b, "invalid coordinate name '" + name + "'");
        out.coordinates.push_back(name);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      coordinates_line_ = v;
    } else if (key == "lagrangian") {
      out.lagrangian = v;
    } else if (key == "hamiltonian") {
      out.hamiltonian = v;
    } else {
      fail(v.line, 1, "unknown key '" + key + "' (expected name, coordinates, lagrangian, hamiltonian or primary)");
    }
  }

  void parameter_entry(const std::string& key, const Located& v, ModelFile& out) {
    once(key, v, "parameters");
    out.parameters.emplace_back(key, number(v));
  }

  void simulate_entry(const std::string& key, const Located& v, ModelFile& out) {
    once(key, v, "simulate");
    const double d = number(v);
    if (key == "h") {
      if (d <= 0.0) fail(v.line, v.column, "step h must be positive");
      out.simulate->h = d;
    } else if (key == "T") {
      if (d <= 0.0) fail(v.line, v.column, "horizon T must be positive");
      out.simulate->T = d;
    } else {
      out.simulate->initial.emplace_back(key, d);
    }
  }

  void finish(ModelFile& out) const {
    if (out.name.empty()) fail(1, 1, "missing 'name'");
    if (out.coordinates.empty()) fail(1, 1, "missing 'coordinates'");
    if (out.lagrangian.text.empty()) fail(1, 1, "missing 'lagrangian'");
    std::set<std::string> names;
    for (const auto& c : out.coordinates) {
      if (!names.insert(c).second) fail(coordinates_line_.line, coordinates_line_.column, "duplicate coordinate '" + c + "'");
      if (sym::is_reserved_name(c)) fail(coordinates_line_.line, coordinates_line_.column, "reserved name '" + c + "'");
    }
    for (const auto& [p, value] : out.parameters) {
      if (sym::is_reserved_name(p)) fail(1, 1, "reserved parameter name '" + p + "'");
    }
    if (out.simulate) {
      if (out.simulate->h <= 0.0 || out.simulate->T <= 0.0) fail(1, 1, "[simulate] needs positive h and T");
    }
  }

  std::string_view text_;
  std::string source_;
  Section section_ = Section::Top;
  std::set<std::string> seen_sections_;
  std::set<std::string> seen_keys_;
  Located coordinates_line_;
};

}  // namespace

std::string located_message(const std::string& source, std::size_t line, std::size_t column, const std::string& message) {
  std::ostringstream os;
  os << source << ':' << line << ':' << column << ": " << message;
  return os.str();
}

ModelFile parse_model_file(std::string_view text, const std::string& source) { return Reader(text, source).run(); }

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open model file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_file(buf.str(), path);
}

}  // namespace contactk::cli
