#include "neumann/field_io.hpp"

#include <fstream>
#include <sstream>

namespace neumann {

using nlohmann::json;

namespace {

Parity parse_parity(const json& v) {
  const auto s = v.get<std::string>();
  if (s == "cos") return Parity::Cos;
  if (s == "sin") return Parity::Sin;
  throw Error(ErrorCode::MalformedInput, "parity must be \"cos\" or \"sin\", got \"" + s + "\"");
}

}  // namespace

DomainSpec domain_from_json(const json& d) {
  if (!d.is_object()) throw Error(ErrorCode::MalformedInput, "\"domain\" must be an object");
  const auto kind = d.at("kind").get<std::string>();
  const double lx = d.at("Lx").get<double>();
  const double ly = d.at("Ly").get<double>();
  if (kind == "torus") return DomainSpec::torus(lx, ly);
  if (kind == "rectangle" || kind == "rectangle_dirichlet") return DomainSpec::rectangle(lx, ly);
  throw Error(ErrorCode::MalformedInput, "unknown domain kind \"" + kind + "\"");
}

json domain_to_json(const DomainSpec& d) {
  return {{"kind", d.periodic() ? "torus" : "rectangle"}, {"Lx", d.lx}, {"Ly", d.ly}};
}

FieldPtr field_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw Error(ErrorCode::MalformedInput, "field document must be a JSON object");
    const DomainSpec domain = domain_from_json(doc.at("domain"));
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      const int nx = g.at("nx").get<int>();
      const int ny = g.at("ny").get<int>();
      auto values = g.at("values").get<std::vector<double>>();
      return std::make_shared<GridField>(domain, nx, ny, std::move(values), doc.at("lambda").get<double>());
    }
    std::vector<SeparableMode> modes;
    for (const auto& m : doc.at("modes")) {
      SeparableMode mode;
      mode.amplitude = m.value("amp", 1.0);
      mode.nx = m.at("nx").get<int>();
      mode.ny = m.at("ny").get<int>();
      const char* dflt = domain.periodic() ? "cos" : "sin";
      mode.px = parse_parity(m.value("px", json(dflt)));
      mode.py = parse_parity(m.value("py", json(dflt)));
      modes.push_back(mode);
    }
    auto f = std::make_shared<AnalyticEigenfunction>(domain, std::move(modes));
    if (doc.contains("lambda")) {
      const double given = doc.at("lambda").get<double>();
      if (std::abs(given - f->lambda()) > 1e-9 * f->lambda())
        throw Error(ErrorCode::InvalidField, "stated lambda does not match the modes");
    }
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
}

FieldPtr load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedInput, "cannot open field file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedInput, path + ": " + e.what());
  }
  return field_from_json(doc);
}

json field_to_json(const ScalarField& f) {
  json out;
  out["domain"] = domain_to_json(f.domain());
  out["lambda"] = f.lambda();
  if (auto a = dynamic_cast<const AnalyticEigenfunction*>(&f)) {
    json modes = json::array();
    for (const auto& m : a->modes())
      modes.push_back({{"amp", m.amplitude},
                       {"nx", m.nx},
                       {"ny", m.ny},
                       {"px", m.px == Parity::Cos ? "cos" : "sin"},
                       {"py", m.py == Parity::Cos ? "cos" : "sin"}});
    out["modes"] = modes;
  } else if (auto g = dynamic_cast<const GridField*>(&f)) {
    out["grid"] = {{"nx", g->nx()}, {"ny", g->ny()}, {"values", g->values()}};
  }
  return out;
}

}  // namespace neumann
