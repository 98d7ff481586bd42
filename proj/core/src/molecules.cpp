#include "dipolegate/molecules.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dipolegate/angular.hpp"
#include "dipolegate/embedded_data.hpp"
#include "dipolegate/errors.hpp"

namespace dipolegate::molecules {

namespace {

using nlohmann::json;
using constants::kHbar;
using constants::kPi;
using constants::kTwoPi;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::optional<Quantity> quantity_field(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const json& q = obj.at(key);
  if (!q.is_object() || !q.contains("value") || !q.contains("unit")) {
    throw InvalidArgument(std::string("field '") + key + "' needs 'value' and 'unit'");
  }
  const auto sym = q.at("unit").get<std::string>();
  const auto unit = unit_from_symbol(sym);
  if (!unit) throw InvalidArgument(std::string("field '") + key + "': unknown unit '" + sym + "'");
  return Quantity(q.at("value").get<double>(), *unit);
}

void put_quantity(json& obj, const char* key, const std::optional<Quantity>& q) {
  if (q) obj[key] = {{"value", q->value()}, {"unit", std::string(symbol(q->unit()))}};
}

MoleculeParams from_json_object(const json& j) {
  try {
    MoleculeParams m;
    m.name = j.at("name").get<std::string>();
    m.description = j.value("description", "");
    m.aliases = j.value("aliases", std::vector<std::string>{});
    m.mu_ground = quantity_field(j, "mu_ground");
    m.mu_excited = quantity_field(j, "mu_excited");
    m.mu_transition_induced = quantity_field(j, "mu_transition_induced");
    m.excited_lifetime = quantity_field(j, "excited_lifetime");
    m.transition_wavelength = quantity_field(j, "transition_wavelength");
    m.rotational_constant = quantity_field(j, "rotational_constant");
    m.electron_spin = j.value("electron_spin", 0.0);
    m.nuclear_spins = j.value("nuclear_spins", std::vector<double>{});
    if (j.contains("hyperfine")) {
      const json& h = j.at("hyperfine");
      m.hyperfine.gamma_sr = quantity_field(h, "gamma_sr");
      m.hyperfine.b_F = quantity_field(h, "b_F");
      m.hyperfine.c = quantity_field(h, "c");
      m.hyperfine.eQq = quantity_field(h, "eQq");
    }
    m.zeeman_ground_per_gauss = quantity_field(j, "zeeman_ground_per_gauss");
    m.zeeman_excited_per_gauss = quantity_field(j, "zeeman_excited_per_gauss");
    m.sources = j.value("sources", std::map<std::string, std::string>{});
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed molecule entry: ") + e.what());
  }
}

json to_json_object(const MoleculeParams& m) {
  json j;
  j["name"] = m.name;
  j["aliases"] = m.aliases;
  j["description"] = m.description;
  put_quantity(j, "mu_ground", m.mu_ground);
  put_quantity(j, "mu_excited", m.mu_excited);
  put_quantity(j, "mu_transition_induced", m.mu_transition_induced);
  put_quantity(j, "excited_lifetime", m.excited_lifetime);
  put_quantity(j, "transition_wavelength", m.transition_wavelength);
  put_quantity(j, "rotational_constant", m.rotational_constant);
  j["electron_spin"] = m.electron_spin;
  j["nuclear_spins"] = m.nuclear_spins;
  json h = json::object();
  put_quantity(h, "gamma_sr", m.hyperfine.gamma_sr);
  put_quantity(h, "b_F", m.hyperfine.b_F);
  put_quantity(h, "c", m.hyperfine.c);
  put_quantity(h, "eQq", m.hyperfine.eQq);
  if (!h.empty()) j["hyperfine"] = h;
  put_quantity(j, "zeeman_ground_per_gauss", m.zeeman_ground_per_gauss);
  put_quantity(j, "zeeman_excited_per_gauss", m.zeeman_excited_per_gauss);
  j["sources"] = m.sources;
  return j;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("invalid JSON: ") + e.what());
  }
}

const std::vector<MoleculeParams>& shipped() {
  static const std::vector<MoleculeParams> table = presets_from_json(embedded::presets_json());
  return table;
}

void require_dimension(const std::optional<Quantity>& q, Dimension d, const char* what) {
  if (q) q->require(d, what);
}

}  // namespace

const Quantity& MoleculeParams::require(const std::optional<Quantity>& field,
                                        std::string_view what) const {
  if (!field) {
    throw InvalidArgument("molecule '" + name + "' has no " + std::string(what));
  }
  return *field;
}

void MoleculeParams::validate() const {
  if (name.empty()) throw InvalidArgument("molecule name must not be empty");
  require_dimension(mu_ground, Dimension::dipole_moment, "mu_ground");
  require_dimension(mu_excited, Dimension::dipole_moment, "mu_excited");
  require_dimension(mu_transition_induced, Dimension::dipole_moment, "mu_transition_induced");
  require_dimension(excited_lifetime, Dimension::time, "excited_lifetime");
  require_dimension(transition_wavelength, Dimension::length, "transition_wavelength");
  require_dimension(rotational_constant, Dimension::wavenumber, "rotational_constant");
  require_dimension(zeeman_ground_per_gauss, Dimension::angular_frequency, "zeeman_ground");
  require_dimension(zeeman_excited_per_gauss, Dimension::angular_frequency, "zeeman_excited");
  for (const auto* q : {&hyperfine.gamma_sr, &hyperfine.b_F, &hyperfine.c, &hyperfine.eQq}) {
    require_dimension(*q, Dimension::angular_frequency, "hyperfine constant");
  }
  if (excited_lifetime && !(excited_lifetime->value() > 0.0)) {
    throw InvalidArgument("excited lifetime must be positive");
  }
  if (!angular::is_half_integer(electron_spin) || electron_spin < 0.0) {
    throw InvalidArgument("electron spin must be a non-negative half-integer");
  }
  for (double i : nuclear_spins) {
    if (!angular::is_half_integer(i) || i < 0.0) {
      throw InvalidArgument("nuclear spins must be non-negative half-integers");
    }
  }
}

std::vector<MoleculeParams> presets_from_json(std::string_view text) {
  const json doc = parse(text);
  if (!doc.contains("molecules") || !doc.at("molecules").is_array()) {
    throw InvalidArgument("preset file needs a 'molecules' array");
  }
  std::vector<MoleculeParams> out;
  for (const json& entry : doc.at("molecules")) out.push_back(from_json_object(entry));
  return out;
}

std::string presets_to_json(const std::vector<MoleculeParams>& molecules) {
  json doc;
  doc["format"] = "dipolegate-presets";
  doc["version"] = 1;
  doc["molecules"] = json::array();
  for (const auto& m : molecules) doc["molecules"].push_back(to_json_object(m));
  return doc.dump(2);
}

std::vector<MoleculeParams> load_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open preset file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return presets_from_json(buf.str());
}

MoleculeParams molecule_from_json(std::string_view text) { return from_json_object(parse(text)); }

std::string molecule_to_json(const MoleculeParams& m) { return to_json_object(m).dump(2); }

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& m : shipped()) names.push_back(m.name);
  return names;
}

MoleculeParams preset(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& m : shipped()) {
    if (lower(m.name) == key) return m;
    for (const auto& a : m.aliases) {
      if (lower(a) == key) return m;
    }
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw UnknownPreset("unknown preset '" + std::string(name) + "'; known presets: " + known);
}

double casimir_F(double I, double J, double F) {
  angular::twice(I);
  angular::twice(F);
  const int tJ = angular::twice(J);
  if (I < 1.0) throw InvalidArgument("no quadrupole coupling for I < 1");
  if (tJ < 0) throw InvalidArgument("J must be non-negative");
  if (!angular::triangle(I, J, F)) throw InvalidArgument("F must lie in |J - I| .. J + I");
  if (tJ == 0) return 0.0;
  if (tJ == 1) throw InvalidArgument("Casimir function is undefined at J = 1/2");
  const double C = F * (F + 1.0) - I * (I + 1.0) - J * (J + 1.0);
  return (0.75 * C * (C + 1.0) - I * (I + 1.0) * J * (J + 1.0)) /
         (2.0 * I * (2.0 * I - 1.0) * (2.0 * J - 1.0) * (2.0 * J + 3.0));
}

DressedStates dressed_states(double omega_coupl, double detuning) {
  if (!(omega_coupl >= 0.0) || !std::isfinite(omega_coupl)) {
    throw InvalidArgument("coupling Rabi frequency must be non-negative");
  }
  if (!std::isfinite(detuning)) throw InvalidArgument("detuning must be finite");
  const double root = std::hypot(omega_coupl, 0.5 * detuning);
  return {0.5 * detuning + root, 0.5 * detuning - root, 0.5 * std::atan2(2.0 * omega_coupl, detuning)};
}

Quantity rotational_linewidth(const Quantity& mu, const Quantity& lambda_mw) {
  const double m = mu.require(Dimension::dipole_moment, "dipole moment").base();
  const double l = lambda_mw.require(Dimension::length, "wavelength").base();
  if (!(m > 0.0) || !(l > 0.0)) throw InvalidArgument("dipole moment and wavelength must be positive");
  return Quantity(4.0 * m * m * std::pow(kTwoPi, 3) / (3.0 * l * l * l * kHbar), Unit::rad_per_s);
}

Quantity exchange_rate(const Quantity& mu, const Quantity& r) {
  const double m = mu.require(Dimension::dipole_moment, "dipole moment").base();
  const double d = r.require(Dimension::length, "separation").base();
  if (!(d > 0.0)) throw InvalidArgument("separation must be positive");
  return Quantity(m * m / (d * d * d * kHbar), Unit::rad_per_s);
}

bool decay_dominates_exchange(const Quantity& mu, const Quantity& lambda_mw, const Quantity& r) {
  return rotational_linewidth(mu, lambda_mw).base() >= exchange_rate(mu, r).base();
}

Quantity stark_mixing_field(const Quantity& rotational_constant, const Quantity& mu) {
  const double b = wavenumber_to_angular_frequency(rotational_constant).base();
  const double m = mu.require(Dimension::dipole_moment, "dipole moment").base();
  if (!(b > 0.0) || !(m > 0.0)) throw InvalidArgument("B and mu must be positive");
  return from_base(2.0 * b * kHbar / m, Unit::kilovolt_per_cm);
}

Quantity zeeman_shift(const MoleculeParams& m, ElectronicState state, const Quantity& field) {
  const double gauss = field.require(Dimension::magnetic_field, "magnetic field").in(Unit::gauss);
  if (gauss < 0.0) throw InvalidArgument("magnetic field must be non-negative");
  const Quantity& scale = state == ElectronicState::ground
                              ? m.require(m.zeeman_ground_per_gauss, "ground Zeeman scale")
                              : m.require(m.zeeman_excited_per_gauss, "excited Zeeman scale");
  return Quantity(scale.value() * gauss, scale.unit());
}

}  // namespace dipolegate::molecules
