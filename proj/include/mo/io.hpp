#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mo/bounds.hpp"
#include "mo/delta2.hpp"
#include "mo/martingale.hpp"
#include "mo/measure.hpp"
#include "mo/norms.hpp"
#include "mo/umd.hpp"

namespace mo {

inline constexpr int kSchemaVersion = 1;

// Round-trip exact decimal for a double; all CSV numbers go through here so
// replays with the same seed stay byte-identical.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": expected a number, got '" + s + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV space/function tables: columns atom_id, weight and optionally a third
// column named either 'value' (a simple function) or 'p' (an exponent map).
// ---------------------------------------------------------------------------

struct SpaceTable {
  AtomicMeasureSpace space;
  std::optional<std::vector<double>> p;
  std::optional<std::vector<double>> value;
};

inline SpaceTable load_space_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  std::vector<std::string> ids;
  std::vector<double> weights, third;
  bool third_is_p = false, has_third = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto where = path + ":" + std::to_string(line_no);
    const auto fields = detail::split(t, ',');
    if (header.empty()) {
      header = fields;
      if (header.size() < 2 || header[0] != "atom_id" || header[1] != "weight")
        throw ParseError(where + ": header must start with 'atom_id,weight'");
      if (header.size() == 3) {
        has_third = true;
        if (header[2] == "p")
          third_is_p = true;
        else if (header[2] != "value")
          throw ParseError(where + ": third column must be 'value' or 'p'");
      } else if (header.size() > 3) {
        throw ParseError(where + ": too many columns");
      }
      continue;
    }
    if (fields.size() != header.size())
      throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields");
    ids.push_back(fields[0]);
    weights.push_back(detail::parse_double(fields[1], where));
    if (has_third) third.push_back(detail::parse_double(fields[2], where));
  }
  if (ids.empty()) throw ParseError(path + ": no data rows");

  SpaceTable out{AtomicMeasureSpace(std::move(ids), std::move(weights)), {}, {}};
  if (has_third) {
    if (third_is_p)
      out.p = std::move(third);
    else
      out.value = std::move(third);
  }
  return out;
}

inline void write_space_csv(std::ostream& os, const AtomicMeasureSpace& space,
                            const std::vector<double>* third = nullptr,
                            const std::string& third_name = "value") {
  os << "atom_id,weight";
  if (third) os << "," << third_name;
  os << "\n";
  for (std::size_t t = 0; t < space.size(); ++t) {
    os << space.ids[t] << "," << fmt_double(space.weights[t]);
    if (third) os << "," << fmt_double((*third)[t]);
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// Flat key-value experiment configs:  key = value  per line, '#' comments.
// ---------------------------------------------------------------------------

class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    KeyValueConfig cfg;
    cfg.path_ = path;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key = detail::trim(t.substr(0, eq));
      if (key.empty())
        throw ParseError(path + ":" + std::to_string(line_no) + ": empty key");
      if (cfg.entries_.count(key))
        throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
      cfg.entries_[key] = {detail::trim(t.substr(eq + 1)), line_no};
    }
    return cfg;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key) const { return entry(key).value; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? entries_.at(key).value : fallback;
  }

  double get_double(const std::string& key) const {
    const Entry& e = entry(key);
    return detail::parse_double(e.value, where(key, e));
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  long get_long(const std::string& key) const {
    const Entry& e = entry(key);
    try {
      std::size_t pos = 0;
      const long v = std::stol(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      throw ParseError(where(key, e) + ": expected an integer, got '" + e.value + "'");
    }
  }
  long get_long(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Entry& e = entries_.at(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ParseError(where(key, e) + ": expected true/false, got '" + e.value + "'");
  }

  std::vector<double> get_double_list(const std::string& key) const {
    const Entry& e = entry(key);
    std::vector<double> out;
    for (const auto& f : detail::split(e.value, ','))
      out.push_back(detail::parse_double(f, where(key, e)));
    return out;
  }

  void check_known_keys(const std::vector<std::string>& known) const {
    for (const auto& [key, e] : entries_) {
      bool ok = false;
      for (const auto& k : known) ok = ok || k == key;
      if (!ok) throw ParseError(where(key, e) + ": unknown key '" + key + "'");
    }
  }

  const std::string& path() const { return path_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  const Entry& entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ParseError(path_ + ": missing required key '" + key + "'");
    return it->second;
  }

  std::string where(const std::string& key, const Entry& e) const {
    (void)key;
    return path_ + ":" + std::to_string(e.line);
  }

  std::string path_;
  std::map<std::string, Entry> entries_;
};

// ---------------------------------------------------------------------------
// JSON records (nlohmann). Keys are emitted sorted, doubles in shortest
// round-trip form; both are deterministic.
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const NormResult& r) {
  return {{"value", r.value},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"bracket_lo", r.bracket_lo},
          {"bracket_hi", r.bracket_hi},
          {"tolerance", r.tolerance},
          {"converged", r.converged}};
}

inline nlohmann::json to_json(const Delta2Certificate& c) {
  nlohmann::json j{{"valid", c.valid},
                   {"K", c.K},
                   {"h", c.h.v},
                   {"h_l1", c.h_l1},
                   {"grid_min", c.grid.empty() ? 0.0 : c.grid.front()},
                   {"grid_max", c.grid.empty() ? 0.0 : c.grid.back()},
                   {"grid_count", c.grid.size()},
                   {"max_violation", c.max_violation}};
  if (!c.valid) j["reason"] = c.reason;
  return j;
}

inline nlohmann::json to_json(const ConstantsReport& r) {
  nlohmann::json betas = nlohmann::json::object();
  for (const auto& [p, b] : r.beta_upper_by_p) betas[fmt_double(p)] = b;
  nlohmann::json j{{"K_phi", r.K_phi},
                   {"h_phi_l1", r.h_phi_l1},
                   {"K_psi", r.K_psi},
                   {"h_psi_l1", r.h_psi_l1},
                   {"C_h", r.C_h},
                   {"zeta00_fiber", r.zeta00_fiber},
                   {"M", r.M},
                   {"C_KX", r.C_KX},
                   {"zeta00_lower", r.zeta00_lower},
                   {"beta_upper", betas}};
  if (std::isfinite(r.p_plus)) {
    j["p_plus"] = r.p_plus;
    j["p_minus"] = r.p_minus;
    j["p_minus_conj"] = r.p_minus_conj;
  }
  if (r.remark_variant) {
    const RemarkConstants& v = *r.remark_variant;
    j["remark_variant"] = {{"K_phi", v.K_phi},
                           {"K_psi", v.K_psi},
                           {"M", v.M},
                           {"C_KX", v.C_KX},
                           {"zeta00_lower", v.zeta00_lower}};
    j["remark_matches"] = r.remark_matches;
  }
  return j;
}

inline std::string constants_table(const ConstantsReport& r) {
  std::ostringstream os;
  auto row = [&](const char* name, const std::string& value) {
    os << "  " << name;
    for (std::size_t i = std::string(name).size(); i < 16; ++i) os << ' ';
    os << value << "\n";
  };
  os << "constants\n";
  row("K_phi", fmt_double(r.K_phi));
  row("||h_phi||_1", fmt_double(r.h_phi_l1));
  row("K_psi", fmt_double(r.K_psi));
  row("||h_psi||_1", fmt_double(r.h_psi_l1));
  row("C_h", fmt_double(r.C_h));
  row("zeta00 fiber", fmt_double(r.zeta00_fiber));
  row("M", std::to_string(r.M));
  row("C_KX", fmt_double(r.C_KX));
  row("zeta00 lower", fmt_double(r.zeta00_lower));
  if (std::isfinite(r.p_plus)) {
    row("p_+", fmt_double(r.p_plus));
    row("p_-", fmt_double(r.p_minus));
    row("p_-'", fmt_double(r.p_minus_conj));
  }
  for (const auto& [p, b] : r.beta_upper_by_p)
    row(("beta_" + fmt_double(p)).c_str(), fmt_double(b));
  if (r.remark_variant) {
    os << "closing-remark literal reading ("
       << (r.remark_matches ? "matches" : "differs, exponentiation dropped") << ")\n";
    row("K_phi", fmt_double(r.remark_variant->K_phi));
    row("K_psi", fmt_double(r.remark_variant->K_psi));
    row("M", std::to_string(r.remark_variant->M));
    row("C_KX", fmt_double(r.remark_variant->C_KX));
    row("zeta00 lower", fmt_double(r.remark_variant->zeta00_lower));
  }
  return os.str();
}

inline nlohmann::json to_json(const UmdEstimate& e, const UmdBudget& budget) {
  return {{"schema_version", kSchemaVersion},
          {"best_ratio", e.best_ratio},
          {"best_signs", e.best_signs.to_string()},
          {"restarts", e.restarts},
          {"ascent_steps", e.ascent_steps},
          {"seed", e.seed},
          {"p", e.p},
          {"depth", e.depth},
          {"budget_restarts", budget.restarts},
          {"budget_steps", budget.steps}};
}

// ---------------------------------------------------------------------------
// Martingale trees as level-ordered CSV: one row per node, the address is the
// +-1 path string (empty for the root), one column per atom.
// ---------------------------------------------------------------------------

inline std::string node_address(int level, std::uint32_t index) {
  std::string s;
  for (int k = level - 1; k >= 0; --k) s.push_back((index >> k) & 1 ? '+' : '-');
  return s;
}

inline void write_martingale_csv(std::ostream& os, const PaleyWalshMartingale& f) {
  os << "level,address";
  for (const auto& id : f.space().atoms.ids) os << "," << id;
  os << "\n";
  for (int k = 0; k <= f.depth(); ++k) {
    for (std::uint32_t i = 0; i < (std::uint32_t(1) << k); ++i) {
      os << k << "," << node_address(k, i);
      const SimpleFunction& val = f.value(k, i);
      for (std::size_t a = 0; a < val.size(); ++a) os << "," << fmt_double(val[a]);
      os << "\n";
    }
  }
}

// Rebuilds a tree from its CSV of node values; only the leaf rows matter, the
// interior is re-derived by the martingale projection (and then checked).
inline PaleyWalshMartingale read_martingale_csv(std::istream& is,
                                                std::shared_ptr<const OrliczSpace> space) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("martingale csv: empty stream");
  std::map<std::string, SimpleFunction> rows;
  int max_level = 0;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto fields = detail::split(t, ',');
    if (fields.size() != 2 + space->atoms.size())
      throw ParseError("martingale csv:" + std::to_string(line_no) + ": bad field count");
    const int level = int(detail::parse_double(fields[0], "martingale csv"));
    max_level = std::max(max_level, level);
    SimpleFunction val(space->atoms.size());
    for (std::size_t a = 0; a < val.size(); ++a)
      val[a] = detail::parse_double(fields[2 + a], "martingale csv");
    rows[fields[1]] = std::move(val);
  }
  const std::size_t leaves = std::size_t(1) << max_level;
  std::vector<SimpleFunction> leaf_values(leaves);
  for (std::uint32_t i = 0; i < leaves; ++i) {
    const auto it = rows.find(node_address(max_level, i));
    if (it == rows.end()) throw ParseError("martingale csv: missing leaf row");
    leaf_values[i] = it->second;
  }
  PaleyWalshMartingale f = PaleyWalshMartingale::from_leaves(std::move(space), leaf_values);
  f.require_valid(1e-9);
  return f;
}

}  // namespace mo
