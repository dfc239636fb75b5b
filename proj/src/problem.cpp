#include "congmod/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace congmod {
namespace {

[[noreturn]] void diag(const std::string& file, int line, int col, const std::string& msg) {
  fail(ErrKind::parse,
       file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

[[noreturn]] void diag_file(const std::string& file, const std::string& msg) {
  fail(ErrKind::parse, file + ": " + msg);
}

// message of an Error without the kind prefix, for rewrapping with a position
std::string strip_kind(const Error& e) {
  std::string w = e.what();
  std::string p = std::string(errkind_name(e.kind())) + ": ";
  return w.rfind(p, 0) == 0 ? w.substr(p.size()) : w;
}

struct Token {
  std::string text;
  int col = 1;
};

std::vector<Token> split_tokens(const std::string& s, int base_col) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    out.push_back({s.substr(i, j - i), base_col + static_cast<int>(i)});
    i = j;
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Parser {
  std::string file;
  Problem pr;

  std::string section;
  int sec_line = 0;
  std::set<std::string> seen_sections;

  bool have_prime = false, have_kind = false, have_dim = false, have_labels = false;
  bool have_unit = false, have_values = false, have_gens = false;
  bool have_cross = false, have_strict = false;
  int dim = 0;
  int module_gens = 0;
  std::map<std::pair<int, int>, Vec> products;
  std::vector<Vec> table_cols;
  std::vector<std::vector<PolyQ>> poly_cols;
  bool saw_point_section = false;
  bool saw_module = false;

  Scalar scalar_at(const Token& t, int line) {
    try {
      return Scalar::parse(t.text);
    } catch (const Error& e) {
      diag(file, line, t.col, strip_kind(e));
    }
  }

  Vec scalar_list(const std::vector<Token>& toks, int line) {
    Vec out;
    for (const auto& t : toks) out.push_back(scalar_at(t, line));
    return out;
  }

  long int_at(const Token& t, int line) {
    if (t.text.empty() || t.text.find_first_not_of("0123456789") != std::string::npos)
      diag(file, line, t.col, "expected a nonnegative integer, got '" + t.text + "'");
    try {
      return std::stol(t.text);
    } catch (const std::exception&) {
      diag(file, line, t.col, "integer out of range: '" + t.text + "'");
    }
  }

  PolyQ poly_at(const std::string& text, int line, int col) {
    if (pr.names.empty()) diag(file, line, col, "polynomial before any vars");
    try {
      return parse_poly(static_cast<int>(pr.names.size()), pr.names, text);
    } catch (const Error& e) {
      diag(file, line, col, strip_kind(e));
    }
  }

  void need_single(const std::vector<Token>& toks, int line, int col, const std::string& key) {
    if (toks.size() != 1)
      diag(file, line, col, "key '" + key + "' takes a single value");
  }

  bool on_off(const Token& t, int line) {
    if (t.text == "on") return true;
    if (t.text == "off") return false;
    diag(file, line, t.col, "expected on or off, got '" + t.text + "'");
  }

  void open_section(const std::string& name, int line, int col) {
    static const std::set<std::string> known = {"dvr", "ring", "point", "module", "chain",
                                               "checks"};
    if (!known.count(name)) diag(file, line, col, "unknown section [" + name + "]");
    if (seen_sections.count(name)) diag(file, line, col, "duplicate section [" + name + "]");
    if ((name == "module" || name == "chain") && !seen_sections.count("ring"))
      diag(file, line, col, "section [" + name + "] must come after [ring]");
    if (name == "chain" && pr.kind != RingKind::poly)
      diag(file, line, col, "section [chain] needs a polynomial ring");
    seen_sections.insert(name);
    section = name;
    sec_line = line;
    if (name == "point") saw_point_section = true;
    if (name == "module") saw_module = true;
  }

  void ring_key(const std::string& key, const std::vector<Token>& idx,
                const std::vector<Token>& vals, int line, int col) {
    if (key == "kind") {
      if (have_kind) diag(file, line, col, "duplicate key 'kind'");
      need_single(vals, line, col, "kind");
      if (vals[0].text == "table")
        pr.kind = RingKind::table;
      else if (vals[0].text == "poly")
        pr.kind = RingKind::poly;
      else
        diag(file, line, vals[0].col, "kind must be table or poly, got '" + vals[0].text + "'");
      have_kind = true;
      return;
    }
    if (!have_kind) diag(file, line, col, "kind must be the first key in [ring]");
    if (pr.kind == RingKind::table) {
      if (key == "dim") {
        if (have_dim) diag(file, line, col, "duplicate key 'dim'");
        need_single(vals, line, col, "dim");
        long d = int_at(vals[0], line);
        if (d < 1 || d > 64) diag(file, line, vals[0].col, "dim must be between 1 and 64");
        dim = static_cast<int>(d);
        have_dim = true;
        return;
      }
      if (!have_dim && (key == "labels" || key == "unit" || key == "mult"))
        diag(file, line, col, "dim must come before '" + key + "'");
      if (key == "labels") {
        if (have_labels) diag(file, line, col, "duplicate key 'labels'");
        if (static_cast<int>(vals.size()) != dim)
          diag(file, line, col,
               "expected " + std::to_string(dim) + " labels, got " + std::to_string(vals.size()));
        for (const auto& t : vals) pr.labels.push_back(t.text);
        have_labels = true;
        return;
      }
      if (key == "unit") {
        if (have_unit) diag(file, line, col, "duplicate key 'unit'");
        if (static_cast<int>(vals.size()) != dim)
          diag(file, line, col, "expected " + std::to_string(dim) + " unit coordinates, got " +
                                    std::to_string(vals.size()));
        pr.unit = scalar_list(vals, line);
        have_unit = true;
        return;
      }
      if (key == "mult") {
        if (idx.size() != 2)
          diag(file, line, col, "expected 'mult i j = coordinates of the product'");
        long i = int_at(idx[0], line), j = int_at(idx[1], line);
        if (i >= dim || j >= dim) diag(file, line, idx[0].col, "basis index out of range");
        if (j < i) diag(file, line, idx[0].col, "give products with i <= j only");
        if (products.count({static_cast<int>(i), static_cast<int>(j)}))
          diag(file, line, col,
               "duplicate product for (" + idx[0].text + ", " + idx[1].text + ")");
        if (static_cast<int>(vals.size()) != dim)
          diag(file, line, col, "expected " + std::to_string(dim) + " coordinates, got " +
                                    std::to_string(vals.size()));
        products[{static_cast<int>(i), static_cast<int>(j)}] = scalar_list(vals, line);
        return;
      }
      diag(file, line, col, "unknown key '" + key + "' in section [ring]");
    }
    // polynomial ring
    if (key == "vars") {
      if (!pr.names.empty()) diag(file, line, col, "duplicate key 'vars'");
      if (vals.empty()) diag(file, line, col, "vars needs at least one name");
      for (const auto& t : vals) pr.names.push_back(t.text);
      return;
    }
    if (key == "gen") {
      pr.ring_gens.push_back(poly_at(trim_value(vals), line, vals.empty() ? col : vals[0].col));
      return;
    }
    diag(file, line, col, "unknown key '" + key + "' in section [ring]");
  }

  // reassemble the raw value text from its tokens (polynomials keep spaces)
  std::string raw_value;
  std::string trim_value(const std::vector<Token>& vals) {
    if (vals.empty()) return "";
    return raw_value;
  }

  void module_key(const std::string& key, const std::vector<Token>& vals, int line, int col) {
    if (key == "gens") {
      if (have_gens) diag(file, line, col, "duplicate key 'gens'");
      need_single(vals, line, col, "gens");
      long g = int_at(vals[0], line);
      if (g < 1 || g > 64) diag(file, line, vals[0].col, "gens must be between 1 and 64");
      module_gens = static_cast<int>(g);
      have_gens = true;
      return;
    }
    if (key == "col") {
      if (!have_gens) diag(file, line, col, "gens must come before 'col'");
      if (pr.kind == RingKind::table) {
        const int want = module_gens * dim;
        if (static_cast<int>(vals.size()) != want)
          diag(file, line, col, "expected " + std::to_string(want) + " coordinates, got " +
                                    std::to_string(vals.size()));
        table_cols.push_back(scalar_list(vals, line));
      } else {
        std::vector<PolyQ> entries;
        std::string text = raw_value;
        int base = vals.empty() ? col : vals[0].col;
        std::size_t start = 0;
        while (true) {
          std::size_t comma = text.find(',', start);
          std::string piece = text.substr(start, comma == std::string::npos ? comma
                                                                            : comma - start);
          entries.push_back(poly_at(trim(piece), line, base + static_cast<int>(start)));
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        if (static_cast<int>(entries.size()) != module_gens)
          diag(file, line, col, "expected " + std::to_string(module_gens) +
                                    " module entries, got " + std::to_string(entries.size()));
        poly_cols.push_back(std::move(entries));
      }
      return;
    }
    diag(file, line, col, "unknown key '" + key + "' in section [module]");
  }

  void key_line(const std::vector<Token>& lhs, const std::vector<Token>& vals, int line) {
    const std::string& key = lhs[0].text;
    const int col = lhs[0].col;
    std::vector<Token> idx(lhs.begin() + 1, lhs.end());
    if (section.empty()) diag(file, line, col, "key outside any section");
    if (!idx.empty() && !(section == "ring" && key == "mult"))
      diag(file, line, idx[0].col, "unexpected token '" + idx[0].text + "' before '='");
    if (vals.empty()) diag(file, line, col, "missing value for '" + key + "'");

    if (section == "dvr") {
      if (key != "prime") diag(file, line, col, "unknown key '" + key + "' in section [dvr]");
      if (have_prime) diag(file, line, col, "duplicate key 'prime'");
      need_single(vals, line, col, "prime");
      if (vals[0].text.find_first_not_of("0123456789") != std::string::npos)
        diag(file, line, vals[0].col, "expected an integer prime, got '" + vals[0].text + "'");
      pr.prime = mpz_class(vals[0].text);
      have_prime = true;
      return;
    }
    if (section == "ring") {
      ring_key(key, idx, vals, line, col);
      return;
    }
    if (section == "point") {
      if (key != "values") diag(file, line, col, "unknown key '" + key + "' in section [point]");
      if (have_values) diag(file, line, col, "duplicate key 'values'");
      pr.point = scalar_list(vals, line);
      have_values = true;
      return;
    }
    if (section == "module") {
      module_key(key, vals, line, col);
      return;
    }
    if (section == "chain") {
      if (key != "cut") diag(file, line, col, "unknown key '" + key + "' in section [chain]");
      pr.chain.push_back(poly_at(trim_value(vals), line, vals[0].col));
      return;
    }
    // checks
    if (key == "cross") {
      if (have_cross) diag(file, line, col, "duplicate key 'cross'");
      need_single(vals, line, col, "cross");
      pr.run_checks = on_off(vals[0], line);
      have_cross = true;
      return;
    }
    if (key == "strict") {
      if (have_strict) diag(file, line, col, "duplicate key 'strict'");
      need_single(vals, line, col, "strict");
      pr.options.strict_module_regularity = on_off(vals[0], line);
      have_strict = true;
      return;
    }
    diag(file, line, col, "unknown key '" + key + "' in section [checks]");
  }

  void finish() {
    if (!have_prime) diag_file(file, "missing [dvr] section with a prime");
    if (!have_kind) diag_file(file, "missing [ring] section");
    if (pr.kind == RingKind::table) {
      if (!have_dim) diag_file(file, "missing key 'dim' in [ring]");
      if (!have_labels) diag_file(file, "missing key 'labels' in [ring]");
      if (!have_unit) diag_file(file, "missing key 'unit' in [ring]");
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
          if (!products.count({i, j}))
            diag_file(file, "missing product for basis pair (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      pr.mult.assign(dim, Mat(dim, dim));
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          const Vec& p = products.at({std::min(i, j), std::max(i, j)});
          for (int k = 0; k < dim; ++k) pr.mult[i].at(k, j) = p[k];
        }
    } else if (pr.names.empty()) {
      diag_file(file, "missing key 'vars' in [ring]");
    }
    if (!saw_point_section || !have_values) diag_file(file, "point required");
    if (saw_module) {
      if (!have_gens) diag_file(file, "missing key 'gens' in [module]");
      if (pr.kind == RingKind::table)
        pr.table_module = TableModule{module_gens, table_cols};
      else
        pr.poly_module = PolyModuleSpec{module_gens, poly_cols};
    }
  }

  void run(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = raw;
      std::size_t hash = s.find('#');
      if (hash != std::string::npos) s = s.substr(0, hash);
      std::string t = trim(s);
      if (t.empty()) continue;
      std::size_t first = s.find_first_not_of(" \t");
      int col0 = static_cast<int>(first) + 1;
      if (t.front() == '[') {
        if (t.back() != ']')
          diag(file, line, col0, "expected a section header like [ring]");
        open_section(trim(t.substr(1, t.size() - 2)), line, col0);
        continue;
      }
      std::size_t eq = s.find('=');
      if (eq == std::string::npos) diag(file, line, col0, "expected 'key = value'");
      std::vector<Token> lhs = split_tokens(s.substr(0, eq), 1);
      if (lhs.empty()) diag(file, line, col0, "expected a key before '='");
      raw_value = trim(s.substr(eq + 1));
      std::vector<Token> vals =
          split_tokens(s.substr(eq + 1), static_cast<int>(eq) + 2);
      key_line(lhs, vals, line);
    }
    finish();
  }
};

void print_scalars(std::ostringstream& o, const Vec& v) {
  for (const auto& x : v) o << " " << x.str();
}

}  // namespace

Problem parse_problem_text(const std::string& text, const std::string& filename) {
  Parser p;
  p.file = filename;
  p.run(text);
  return p.pr;
}

Problem parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrKind::parse, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str(), path);
}

std::string print_problem(const Problem& pr) {
  std::ostringstream o;
  o << "[dvr]\nprime = " << pr.prime.get_str() << "\n\n[ring]\n";
  if (pr.kind == RingKind::table) {
    const int d = static_cast<int>(pr.mult.size());
    o << "kind = table\ndim = " << d << "\nlabels =";
    for (const auto& l : pr.labels) o << " " << l;
    o << "\nunit =";
    print_scalars(o, pr.unit);
    o << "\n";
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        o << "mult " << i << " " << j << " =";
        for (int k = 0; k < d; ++k) o << " " << pr.mult[i].at(k, j).str();
        o << "\n";
      }
  } else {
    o << "kind = poly\nvars =";
    for (const auto& n : pr.names) o << " " << n;
    o << "\n";
    for (const auto& g : pr.ring_gens) o << "gen = " << print_poly(g, pr.names) << "\n";
  }
  o << "\n[point]\nvalues =";
  print_scalars(o, pr.point);
  o << "\n";
  if (pr.table_module) {
    o << "\n[module]\ngens = " << pr.table_module->gens << "\n";
    for (const auto& c : pr.table_module->columns) {
      o << "col =";
      print_scalars(o, c);
      o << "\n";
    }
  }
  if (pr.poly_module) {
    o << "\n[module]\ngens = " << pr.poly_module->gens << "\n";
    for (const auto& c : pr.poly_module->columns) {
      o << "col = ";
      for (std::size_t i = 0; i < c.size(); ++i)
        o << (i ? ", " : "") << print_poly(c[i], pr.names);
      o << "\n";
    }
  }
  if (!pr.chain.empty()) {
    o << "\n[chain]\n";
    for (const auto& f : pr.chain) o << "cut = " << print_poly(f, pr.names) << "\n";
  }
  if (!pr.run_checks || pr.options.strict_module_regularity) {
    o << "\n[checks]\n";
    if (!pr.run_checks) o << "cross = off\n";
    if (pr.options.strict_module_regularity) o << "strict = on\n";
  }
  return o.str();
}

}  // namespace congmod
