#include "run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace binn::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ConfigError(field + ": " + why);
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + key, "has the wrong type");
  }
}

Vec2 point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad(field, "expected [x1, x2]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

BoundaryCondition inline_bc(const json& j, bool elastic, const std::string& field) {
  if (!j.is_object()) bad(field, "expected an object");
  const std::string type = j.value("type", "");
  if (type == "interface") return BoundaryCondition::interface();
  if (type != "dirichlet" && type != "neumann") bad(field + ".type", "must be dirichlet, neumann or interface");
  if (!j.contains("value")) bad(field + ".value", "missing");
  if (elastic) {
    const Vec2 v = point(j["value"], field + ".value");
    const VectorField f = [v](const Vec2&) { return v; };
    return type == "dirichlet" ? BoundaryCondition::dirichlet(f) : BoundaryCondition::neumann(f);
  }
  if (!j["value"].is_number()) bad(field + ".value", "expected a number");
  const double v = j["value"].get<double>();
  const ScalarField f = [v](const Vec2&) { return v; };
  return type == "dirichlet" ? BoundaryCondition::dirichlet(f) : BoundaryCondition::neumann(f);
}

PieceSpec inline_piece(const json& j, bool elastic, const std::string& field) {
  const int count = j.value("segments", 10);
  if (count < 1) bad(field + ".segments", "must be >= 1");
  const BoundaryCondition bc = inline_bc(j.value("bc", json::object()), elastic, field + ".bc");
  if (j.contains("line")) {
    const json& l = j["line"];
    if (!l.is_array() || l.size() != 2) bad(field + ".line", "expected [[x1, x2], [x1, x2]]");
    return line_piece(point(l[0], field + ".line[0]"), point(l[1], field + ".line[1]"), count, bc);
  }
  if (j.contains("arc")) {
    const json& a = j["arc"];
    return arc_piece(point(a.value("center", json::array({0.0, 0.0})), field + ".arc.center"),
                     a.value("radius", 1.0), a.value("start", 0.0), a.value("end", 0.0), count, bc);
  }
  if (j.contains("circle")) {
    const json& c = j["circle"];
    return circle_piece(point(c.value("center", json::array({0.0, 0.0})), field + ".circle.center"),
                        c.value("radius", 1.0), count, c.value("clockwise", false), bc);
  }
  bad(field, "needs one of line, arc or circle");
}

}  // namespace

void RunConfig::validate() const {
  const auto names = benchmark_names();
  const bool known = problem == "inline" || problem == "cylinder_flow" ||
                     std::find(names.begin(), names.end(), problem) != names.end();
  if (!known) {
    std::string list;
    for (const auto& n : names) list += n + ", ";
    bad("problem", "unknown benchmark '" + problem + "' (known: " + list + "inline)");
  }
  if (train.iterations < 0) bad("train.iterations", "must be >= 0");
  if (!(train.lr > 0.0)) bad("train.lr", "must be > 0");
  if (train.threads < 1) bad("train.threads", "must be >= 1");
  if (train.batch < 0) bad("train.batch", "must be >= 0");
  if (train.checkpoint_every < 1) bad("train.checkpoint_every", "must be >= 1");
  if (width < 1) bad("network.width", "must be >= 1");
  if (blocks < 0) bad("network.blocks", "must be >= 0");
  if (ng < 2 || ng > 64 || ng % 2 != 0) {
    bad("quadrature.ng", "must be an even number in [2, 64] (singular segments pair symmetric nodes), got " +
                             std::to_string(ng));
  }
  if (refine < 1) bad("refine", "must be >= 1");
  try {
    train.validate();
  } catch (const std::exception& e) {
    bad("train", e.what());
  }
}

RunConfig run_config_from_json(const json& doc) {
  if (!doc.is_object()) bad("config", "top level must be a JSON object");
  RunConfig c;
  if (doc.contains("problem")) {
    if (doc["problem"].is_string()) {
      c.problem = doc["problem"].get<std::string>();
    } else if (doc["problem"].is_object()) {
      c.problem = "inline";
      c.inline_problem = doc["problem"];
    } else {
      bad("problem", "expected a benchmark name or an inline description");
    }
  }
  if (doc.contains("train")) {
    const json& t = doc["train"];
    if (!t.is_object()) bad("train", "expected an object");
    if (t.contains("iterations")) c.iterations_set = true;
    if (t.contains("lr")) c.lr_set = true;
    read(t, "iterations", "train.", c.train.iterations);
    read(t, "lr", "train.", c.train.lr);
    read(t, "beta1", "train.", c.train.beta1);
    read(t, "beta2", "train.", c.train.beta2);
    read(t, "eps", "train.", c.train.eps);
    read(t, "seed", "train.", c.train.seed);
    read(t, "threads", "train.", c.train.threads);
    read(t, "batch", "train.", c.train.batch);
    read(t, "checkpoint_every", "train.", c.train.checkpoint_every);
  }
  if (doc.contains("network")) {
    read(doc["network"], "width", "network.", c.width);
    read(doc["network"], "blocks", "network.", c.blocks);
  }
  if (doc.contains("quadrature")) read(doc["quadrature"], "ng", "quadrature.", c.ng);
  read(doc, "refine", "", c.refine);
  read(doc, "outputs", "", c.outputs);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) bad("config", "cannot read " + path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    bad("config", std::string("invalid JSON: ") + e.what());
  }
  return run_config_from_json(doc);
}

std::string resolve_output_dir(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("BINN_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "binn_out";
}

Benchmark inline_benchmark(const json& p, int ng) {
  const std::string physics = p.value("physics", "potential");
  if (physics != "potential" && physics != "elastic") bad("problem.physics", "must be potential or elastic");
  const bool elastic = physics == "elastic";
  if (!p.contains("loops") || !p["loops"].is_array() || p["loops"].empty()) {
    bad("problem.loops", "expected a non-empty array");
  }
  GeometrySpec spec;
  for (std::size_t i = 0; i < p["loops"].size(); ++i) {
    const json& l = p["loops"][i];
    const std::string field = "problem.loops[" + std::to_string(i) + "]";
    LoopSpec loop;
    loop.closed = l.value("closed", true);
    if (!l.contains("pieces") || !l["pieces"].is_array()) bad(field + ".pieces", "expected an array");
    for (std::size_t k = 0; k < l["pieces"].size(); ++k) {
      loop.pieces.push_back(
          inline_piece(l["pieces"][k], elastic, field + ".pieces[" + std::to_string(k) + "]"));
    }
    spec.loops.push_back(std::move(loop));
  }
  Benchmark b;
  b.name = "inline";
  try {
    const Boundary boundary = build_boundary(spec);
    if (elastic) {
      b.physics = Physics::Elastic;
      const json m = p.value("material", json::object());
      const std::string plane = m.value("plane", "strain");
      if (plane != "strain" && plane != "stress") bad("problem.material.plane", "must be strain or stress");
      const Material mat = Material::make(m.value("E", 1.0), m.value("nu", 0.3),
                                          plane == "stress" ? PlaneCondition::PlaneStress
                                                            : PlaneCondition::PlaneStrain);
      const std::string kernel = p.value("kernel", "full_plane");
      if (kernel != "full_plane" && kernel != "half_plane") {
        bad("problem.kernel", "must be full_plane or half_plane");
      }
      b.elastic = single_region(boundary, mat,
                                kernel == "half_plane" ? KernelKind::HalfPlane : KernelKind::FullPlane, ng);
      b.elastic.model().validate();
    } else {
      b.physics = Physics::Potential;
      const std::string domain = p.value("domain", "interior");
      if (domain != "interior" && domain != "exterior") bad("problem.domain", "must be interior or exterior");
      b.potential.boundary = boundary;
      b.potential.domain = domain == "exterior" ? DomainKind::Exterior : DomainKind::Interior;
      b.potential.ng = ng;
      b.potential.model().validate();
    }
    b.reference.path = trajectory(boundary, 1000);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    bad("problem", e.what());
  } catch (const std::exception& e) {
    bad("problem", e.what());
  }
  return b;
}

Benchmark build_benchmark(const RunConfig& cfg) {
  if (cfg.problem == "inline") return inline_benchmark(cfg.inline_problem, cfg.ng);
  auto b = make_benchmark(cfg.problem, cfg.ng);
  if (!b) bad("problem", "unknown benchmark '" + cfg.problem + "'");
  return *b;
}

}  // namespace binn::cli
