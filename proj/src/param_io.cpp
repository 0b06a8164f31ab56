#include "aqs/param_io.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "aqs/error.hpp"
#include "aqs/io_util.hpp"

namespace aqs {
namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;  // for records
  std::string key, value;           // for `key = value`
  bool assignment;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(start, end - start);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (!raw.empty()) {
      Line line{number, {}, {}, {}, false};
      if (auto eq = raw.find('='); eq != std::string_view::npos) {
        line.assignment = true;
        line.key = std::string(trim(raw.substr(0, eq)));
        line.value = std::string(trim(raw.substr(eq + 1)));
      } else {
        line.tokens = split_ws(raw);
      }
      lines.push_back(std::move(line));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::string at(int line) { return "line " + std::to_string(line) + ": "; }

class Collector {
 public:
  void add(int line, const std::string& msg) { errors_.push_back(at(line) + msg); }
  void add_global(const std::string& msg) { errors_.push_back(msg); }
  bool ok() const { return errors_.empty(); }
  void throw_if_any() const {
    if (!errors_.empty()) throw ParseError(errors_);
  }

 private:
  std::vector<std::string> errors_;
};

std::optional<std::size_t> parse_index(const std::string& tok, std::size_t n, int line, Collector& errs) {
  auto v = parse_integer(tok);
  if (!v || *v < 1 || (n > 0 && static_cast<std::size_t>(*v) > n)) {
    errs.add(line, "index '" + tok + "' out of range 1.." + std::to_string(n));
    return std::nullopt;
  }
  return static_cast<std::size_t>(*v - 1);
}

std::optional<double> parse_number(const std::string& tok, int line, Collector& errs) {
  auto v = parse_double(tok);
  if (!v) errs.add(line, "expected a finite number, got '" + tok + "'");
  return v;
}

// Pulls `format` and the size key; reports a wrong format.
std::optional<std::size_t> read_header(const std::vector<Line>& lines, std::string_view format,
                                       std::string_view size_key, Collector& errs) {
  bool format_seen = false;
  std::optional<std::size_t> n;
  for (const auto& l : lines) {
    if (!l.assignment) continue;
    if (l.key == "format") {
      format_seen = true;
      if (l.value != format) errs.add(l.number, "expected format '" + std::string(format) + "', got '" + l.value + "'");
    } else if (l.key == size_key) {
      auto v = parse_integer(l.value);
      if (!v || *v < 1)
        errs.add(l.number, std::string(size_key) + " must be a positive integer");
      else
        n = static_cast<std::size_t>(*v);
    }
  }
  if (!format_seen) errs.add_global("missing 'format = " + std::string(format) + "' line");
  if (!n) errs.add_global("missing '" + std::string(size_key) + " = <N>' line");
  return n;
}

}  // namespace

SiteNetwork parse_network(std::string_view text) {
  const auto lines = tokenize(text);
  Collector errs;
  const auto n_opt = read_header(lines, "network/1", "sites", errs);
  const std::size_t n = n_opt.value_or(0);

  std::vector<std::optional<double>> energies(n);
  std::vector<std::string> labels(n);
  Eigen::MatrixXd couplings = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::set<std::pair<std::size_t, std::size_t>> seen_pairs;

  for (const auto& l : lines) {
    if (l.assignment) {
      if (l.key != "format" && l.key != "sites") errs.add(l.number, "unknown key '" + l.key + "'");
      continue;
    }
    const auto& t = l.tokens;
    if (t[0] == "site") {
      if (t.size() < 3 || t.size() > 4) {
        errs.add(l.number, "expected 'site <i> <energy> [<label>]'");
        continue;
      }
      if (n == 0) continue;
      auto i = parse_index(t[1], n, l.number, errs);
      auto e = parse_number(t[2], l.number, errs);
      if (!i || !e) continue;
      if (energies[*i]) {
        errs.add(l.number, "site " + t[1] + " listed twice");
        continue;
      }
      energies[*i] = *e;
      labels[*i] = t.size() == 4 ? t[3] : "site" + std::to_string(*i + 1);
    } else if (t[0] == "coupling") {
      if (t.size() != 4) {
        errs.add(l.number, "expected 'coupling <m> <n> <value>'");
        continue;
      }
      if (n == 0) continue;
      auto m = parse_index(t[1], n, l.number, errs);
      auto k = parse_index(t[2], n, l.number, errs);
      auto v = parse_number(t[3], l.number, errs);
      if (!m || !k || !v) continue;
      if (*m == *k) {
        errs.add(l.number, "coupling of a site to itself is not allowed; use the site energy");
        continue;
      }
      auto key = std::minmax(*m, *k);
      if (!seen_pairs.insert(key).second) {
        errs.add(l.number, "coupling (" + t[1] + ", " + t[2] + ") listed twice");
        continue;
      }
      couplings(static_cast<Eigen::Index>(*m), static_cast<Eigen::Index>(*k)) = *v;
      couplings(static_cast<Eigen::Index>(*k), static_cast<Eigen::Index>(*m)) = *v;
    } else {
      errs.add(l.number, "unknown record '" + t[0] + "'");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!energies[i]) errs.add_global("site " + std::to_string(i + 1) + " has no 'site' line");
  errs.throw_if_any();

  SiteNetwork net;
  net.n_sites = n;
  for (auto& e : energies) net.on_site.push_back(*e);
  net.couplings = std::move(couplings);
  net.labels = std::move(labels);
  net.validate();
  return net;
}

std::string serialize_network(const SiteNetwork& net) {
  net.validate();
  std::ostringstream out;
  out << "format = network/1\n";
  out << "sites = " << net.n_sites << "\n";
  for (std::size_t i = 0; i < net.n_sites; ++i) {
    out << "site " << i + 1 << ' ' << format_double(net.on_site[i]);
    if (!net.labels.empty()) out << ' ' << net.labels[i];
    out << '\n';
  }
  for (std::size_t m = 0; m < net.n_sites; ++m)
    for (std::size_t k = m + 1; k < net.n_sites; ++k) {
      const double v = net.couplings(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
      if (v != 0.0) out << "coupling " << m + 1 << ' ' << k + 1 << ' ' << format_double(v) << '\n';
    }
  return out.str();
}

SiteNetwork load_network(const std::filesystem::path& path) { return parse_network(read_file(path)); }

WaveguideGeometry parse_geometry(std::string_view text) {
  const auto lines = tokenize(text);
  Collector errs;
  const auto n_opt = read_header(lines, "waveguide-geometry/1", "guides", errs);
  const std::size_t n = n_opt.value_or(0);

  std::optional<double> c0, d0;
  std::vector<std::optional<double>> betas(n);
  std::vector<std::string> labels(n);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd sep = Eigen::MatrixXd::Zero(ni, ni);
  std::set<std::pair<std::size_t, std::size_t>> seen_pairs;

  for (const auto& l : lines) {
    if (l.assignment) {
      if (l.key == "coupling_scale") {
        c0 = parse_number(l.value, l.number, errs);
      } else if (l.key == "decay_length") {
        d0 = parse_number(l.value, l.number, errs);
      } else if (l.key != "format" && l.key != "guides") {
        errs.add(l.number, "unknown key '" + l.key + "'");
      }
      continue;
    }
    const auto& t = l.tokens;
    if (t[0] == "guide") {
      if (t.size() < 3 || t.size() > 4) {
        errs.add(l.number, "expected 'guide <i> <beta> [<label>]'");
        continue;
      }
      if (n == 0) continue;
      auto i = parse_index(t[1], n, l.number, errs);
      auto b = parse_number(t[2], l.number, errs);
      if (!i || !b) continue;
      if (betas[*i]) {
        errs.add(l.number, "guide " + t[1] + " listed twice");
        continue;
      }
      betas[*i] = *b;
      labels[*i] = t.size() == 4 ? t[3] : "site" + std::to_string(*i + 1);
    } else if (t[0] == "separation") {
      if (t.size() != 4) {
        errs.add(l.number, "expected 'separation <m> <n> <micrometres>'");
        continue;
      }
      if (n == 0) continue;
      auto m = parse_index(t[1], n, l.number, errs);
      auto k = parse_index(t[2], n, l.number, errs);
      auto v = parse_number(t[3], l.number, errs);
      if (!m || !k || !v) continue;
      if (*m == *k) {
        errs.add(l.number, "separation of a guide from itself is meaningless");
        continue;
      }
      if (!(*v > 0.0)) {
        errs.add(l.number, "separation must be positive");
        continue;
      }
      if (!seen_pairs.insert(std::minmax(*m, *k)).second) {
        errs.add(l.number, "separation (" + t[1] + ", " + t[2] + ") listed twice");
        continue;
      }
      sep(static_cast<Eigen::Index>(*m), static_cast<Eigen::Index>(*k)) = *v;
      sep(static_cast<Eigen::Index>(*k), static_cast<Eigen::Index>(*m)) = *v;
    } else {
      errs.add(l.number, "unknown record '" + t[0] + "'");
    }
  }
  if (!c0) errs.add_global("missing 'coupling_scale = <C0>' line");
  if (!d0) errs.add_global("missing 'decay_length = <d0>' line");
  for (std::size_t i = 0; i < n; ++i)
    if (!betas[i]) errs.add_global("guide " + std::to_string(i + 1) + " has no 'guide' line");
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = m + 1; k < n; ++k)
      if (!seen_pairs.count({m, k}))
        errs.add_global("missing separation for guides " + std::to_string(m + 1) + " and " + std::to_string(k + 1));
  errs.throw_if_any();

  WaveguideGeometry g;
  g.n_guides = n;
  g.separations = std::move(sep);
  for (auto& b : betas) g.prop_constants.push_back(*b);
  g.coupling_scale = *c0;
  g.decay_length = *d0;
  g.labels = std::move(labels);
  g.validate();
  return g;
}

std::string serialize_geometry(const WaveguideGeometry& geom) {
  geom.validate();
  std::ostringstream out;
  out << "format = waveguide-geometry/1\n";
  out << "guides = " << geom.n_guides << "\n";
  out << "coupling_scale = " << format_double(geom.coupling_scale) << "\n";
  out << "decay_length = " << format_double(geom.decay_length) << "\n";
  for (std::size_t i = 0; i < geom.n_guides; ++i) {
    out << "guide " << i + 1 << ' ' << format_double(geom.prop_constants[i]);
    if (!geom.labels.empty()) out << ' ' << geom.labels[i];
    out << '\n';
  }
  for (std::size_t m = 0; m < geom.n_guides; ++m)
    for (std::size_t k = m + 1; k < geom.n_guides; ++k)
      out << "separation " << m + 1 << ' ' << k + 1 << ' '
          << format_double(geom.separations(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k))) << '\n';
  return out.str();
}

WaveguideGeometry load_geometry(const std::filesystem::path& path) { return parse_geometry(read_file(path)); }

MappingRecord parse_mapping(std::string_view text) {
  const auto lines = tokenize(text);
  Collector errs;
  bool format_seen = false;
  std::optional<double> scale;
  std::optional<std::vector<std::size_t>> bijection;
  for (const auto& l : lines) {
    if (!l.assignment) {
      errs.add(l.number, "expected 'key = value'");
      continue;
    }
    if (l.key == "format") {
      format_seen = true;
      if (l.value != "mapping/1") errs.add(l.number, "expected format 'mapping/1', got '" + l.value + "'");
    } else if (l.key == "unit_scale") {
      scale = parse_number(l.value, l.number, errs);
      if (scale && !(*scale > 0.0)) errs.add(l.number, "unit_scale must be positive");
    } else if (l.key == "bijection") {
      std::vector<std::size_t> perm;
      bool good = true;
      for (const auto& tok : split_ws(l.value)) {
        auto v = parse_integer(tok);
        if (!v || *v < 1) {
          errs.add(l.number, "bijection entries must be positive integers, got '" + tok + "'");
          good = false;
          break;
        }
        perm.push_back(static_cast<std::size_t>(*v - 1));
      }
      if (good) bijection = std::move(perm);
    } else {
      errs.add(l.number, "unknown key '" + l.key + "'");
    }
  }
  if (!format_seen) errs.add_global("missing 'format = mapping/1' line");
  if (!scale) errs.add_global("missing 'unit_scale = <s>' line");
  if (!bijection) errs.add_global("missing 'bijection = ...' line");
  errs.throw_if_any();

  MappingRecord rec{std::move(*bijection), *scale};
  try {
    rec.validate();
  } catch (const InputError& e) {
    throw ParseError({e.what()});
  }
  return rec;
}

std::string serialize_mapping(const MappingRecord& rec) {
  rec.validate();
  std::ostringstream out;
  out << "format = mapping/1\n";
  out << "unit_scale = " << format_double(rec.unit_scale) << "\n";
  out << "bijection =";
  for (auto p : rec.site_bijection) out << ' ' << p + 1;
  out << '\n';
  return out.str();
}

MappingRecord load_mapping(const std::filesystem::path& path) { return parse_mapping(read_file(path)); }

Hamiltonian load_hamiltonian(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  for (const auto& l : tokenize(text)) {
    if (l.assignment && l.key == "format") {
      if (l.value == "waveguide-geometry/1") return waveguide_hamiltonian(parse_geometry(text));
      break;
    }
  }
  return build_tight_binding(parse_network(text));
}

}  // namespace aqs
