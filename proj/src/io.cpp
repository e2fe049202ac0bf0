#include "mdelab/io.hpp"

#include "mdelab/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mdelab::io {

namespace {

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ValidationError("expected an object", path.empty() ? "(root)" : path);
  const auto it = j.find(key);
  const std::string where = path.empty() ? key : path + "." + key;
  if (it == j.end()) throw ValidationError("missing field", where);
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError("expected a number", path);
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ValidationError("non-finite number", path);
  return x;
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j.at(key), path + "." + key);
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError("expected an integer", path);
  return j.get<int>();
}

std::optional<double> optional_number(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j.at(key), path + "." + key);
}

std::string string_field(const json& j, const std::string& key, const std::string& path) {
  const auto& v = member(j, key, path);
  if (!v.is_string()) throw ValidationError("expected a string", path.empty() ? key : path + "." + key);
  return v.get<std::string>();
}

Point point(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError("expected an array", path);
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    p[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return p;
}

void check_schema(const json& j) {
  if (!j.is_object()) throw ValidationError("expected a JSON object", "(root)");
  if (j.contains("schema")) {
    if (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != 1) {
      throw ValidationError("unsupported schema version", "schema");
    }
  }
}

int dimension(const json& j) {
  const int dim = integer(member(j, "dim", ""), "dim");
  if (dim < 1) throw ValidationError("dim must be >= 1", "dim");
  return dim;
}

// Constructor errors carry in-memory names ("mass"); report the file field instead.
template <typename F>
auto with_field(const std::string& field, F&& build) {
  try {
    return build();
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), field);
  }
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'", "file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what(), "file");
  }
}

DiscreteMeasure measure_from_json(const json& j) {
  check_schema(j);
  const int dim = dimension(j);
  if (j.contains("dirac")) {
    const Point x = point(j.at("dirac"), "dirac");
    if (x.size() != dim) throw ValidationError("dirac point has wrong length", "dirac");
    return DiscreteMeasure::dirac(x);
  }
  if (j.contains("uniform")) {
    if (dim != 1) throw ValidationError("uniform generator is one-dimensional", "dim");
    const auto& u = j.at("uniform");
    const double a = number(member(u, "a", "uniform"), "uniform.a");
    const double b = number(member(u, "b", "uniform"), "uniform.b");
    const int count = integer(member(u, "atoms", "uniform"), "uniform.atoms");
    if (!(b > a)) throw ValidationError("need a < b", "uniform.b");
    if (count < 1) throw ValidationError("need at least one atom", "uniform.atoms");
    return uniform_atoms(a, b, count);
  }
  const auto& atoms = member(j, "atoms", "");
  if (!atoms.is_array() || atoms.empty()) throw ValidationError("expected a non-empty array", "atoms");
  std::vector<Atom> out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string where = "atoms[" + std::to_string(i) + "]";
    const Point row = point(atoms[i], where);
    if (row.size() != dim + 1) throw ValidationError("expected dim + 1 entries", where);
    const double mass = row[dim];
    if (!(mass > 0.0)) throw ValidationError("mass must be positive", where);
    out.push_back({row.head(dim), mass});
  }
  return with_field("atoms", [&] { return DiscreteMeasure(dim, std::move(out)); });
}

json to_json(const DiscreteMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) {
    json row = json::array();
    for (Eigen::Index d = 0; d < a.position.size(); ++d) row.push_back(a.position[d]);
    row.push_back(a.mass);
    atoms.push_back(std::move(row));
  }
  return {{"schema", 1}, {"dim", mu.dim()}, {"atoms", std::move(atoms)}};
}

LiftedMeasure lifted_from_json(const json& j) {
  check_schema(j);
  const int dim = dimension(j);
  const auto& atoms = member(j, "atoms", "");
  if (!atoms.is_array() || atoms.empty()) throw ValidationError("expected a non-empty array", "atoms");
  std::vector<LiftedAtom> out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string where = "atoms[" + std::to_string(i) + "]";
    const Point row = point(atoms[i], where);
    if (row.size() != 2 * dim + 1) throw ValidationError("expected 2 dim + 1 entries", where);
    const double mass = row[2 * dim];
    if (!(mass > 0.0)) throw ValidationError("mass must be positive", where);
    out.push_back({row.head(dim), row.segment(dim, dim), mass});
  }
  return with_field("atoms", [&] { return LiftedMeasure(dim, std::move(out)); });
}

json to_json(const LiftedMeasure& V) {
  json atoms = json::array();
  for (const auto& a : V.atoms()) {
    json row = json::array();
    for (Eigen::Index d = 0; d < a.position.size(); ++d) row.push_back(a.position[d]);
    for (Eigen::Index d = 0; d < a.velocity.size(); ++d) row.push_back(a.velocity[d]);
    row.push_back(a.mass);
    atoms.push_back(std::move(row));
  }
  return {{"schema", 1}, {"dim", V.dim()}, {"atoms", std::move(atoms)}};
}

namespace {

FieldTerm term_from_json(const json& j, const std::string& path) {
  const std::string type = string_field(j, "type", path);
  FieldTerm t;
  if (type == "constant") {
    t.kind = FieldTerm::Kind::Constant;
    t.offset = point(member(j, "value", path), path + ".value");
  } else if (type == "linear") {
    t.kind = FieldTerm::Kind::Linear;
    t.scale = number(member(j, "scale", path), path + ".scale");
    if (j.contains("offset")) t.offset = point(j.at("offset"), path + ".offset");
  } else if (type == "sgn_sqrt") {
    t.kind = FieldTerm::Kind::SgnSqrt;
    t.scale = number_or(j, "scale", 1.0, path);
  } else if (type == "sin") {
    t.kind = FieldTerm::Kind::Sinusoidal;
    t.scale = number(member(j, "amplitude", path), path + ".amplitude");
    t.frequency = number(member(j, "frequency", path), path + ".frequency");
    t.phase = number_or(j, "phase", 0.0, path);
  } else if (type == "polynomial") {
    t.kind = FieldTerm::Kind::Polynomial;
    const Point c = point(member(j, "coefficients", path), path + ".coefficients");
    t.coefficients.assign(c.data(), c.data() + c.size());
  } else {
    throw ValidationError("unknown field term '" + type + "'", path + ".type");
  }
  return t;
}

}  // namespace

VelocityField field_from_json(const json& j) {
  if (j.is_object() && j.contains("terms")) {
    const auto& terms = j.at("terms");
    if (!terms.is_array()) throw ValidationError("expected an array", "field.terms");
    std::vector<FieldTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      out.push_back(term_from_json(terms[i], "field.terms[" + std::to_string(i) + "]"));
    }
    return VelocityField(std::move(out));
  }
  return VelocityField({term_from_json(j, "field")});
}

InteractionKernel kernel_from_json(const json& j) {
  const std::string kind = string_field(j, "kind", "kernel");
  if (kind == "zero") return InteractionKernel::zero();
  const double alpha = number_or(j, "alpha", 1.0, "kernel");
  if (kind == "linear") return InteractionKernel::linear(alpha);
  if (kind == "bounded_attraction") return InteractionKernel::bounded_attraction(alpha);
  if (kind == "bump_alignment") {
    const double radius = number_or(j, "radius", 1.0, "kernel");
    if (!(radius > 0.0)) throw ValidationError("radius must be > 0", "kernel.radius");
    return InteractionKernel::bump_alignment(alpha, radius);
  }
  throw ValidationError("unknown kernel '" + kind + "'", "kernel.kind");
}

PvfSpec pvf_from_json(const json& j) {
  check_schema(j);
  const std::string kind = string_field(j, "kind", "");
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (!params.is_object()) throw ValidationError("expected an object", "params");
  const auto h1 = optional_number(params, "h1_constant", "params");
  if (h1 && !(*h1 >= 0.0)) throw ValidationError("h1_constant must be >= 0", "params.h1_constant");

  PvfSpec spec;
  if (kind == "ode_lift") {
    spec = PvfSpec::ode_lift(field_from_json(member(params, "field", "params")));
  } else if (kind == "constant") {
    const auto& fiber = member(params, "fiber", "params");
    if (!fiber.is_array() || fiber.empty()) throw ValidationError("expected a non-empty array", "params.fiber");
    std::vector<std::pair<Point, double>> out;
    for (std::size_t i = 0; i < fiber.size(); ++i) {
      const std::string where = "params.fiber[" + std::to_string(i) + "]";
      const Point row = point(fiber[i], where);
      if (row.size() < 2) throw ValidationError("expected velocity entries followed by a weight", where);
      const double p = row[row.size() - 1];
      if (!(p > 0.0)) throw ValidationError("weight must be positive", where);
      out.emplace_back(row.head(row.size() - 1), p);
    }
    std::vector<double> weights;
    for (const auto& f : out) weights.push_back(f.second);
    if (std::abs(compensated_sum(weights) - 1.0) > kRenormalizeTolerance) {
      throw ValidationError("fiber weights must sum to 1", "params.fiber");
    }
    spec = PvfSpec::constant(std::move(out));
  } else if (kind == "median_split") {
    spec = PvfSpec::median_split();
  } else if (kind == "phi_diffusion") {
    RankSpeed phi;
    const std::string shape = params.contains("phi") ? string_field(params, "phi", "params") : "centered_linear";
    if (shape == "centered_linear") {
      phi.kind = RankSpeed::Kind::CenteredLinear;
    } else if (shape == "signed_square") {
      phi.kind = RankSpeed::Kind::SignedSquare;
    } else {
      throw ValidationError("unknown phi '" + shape + "'", "params.phi");
    }
    phi.scale = number_or(params, "scale", 1.0, "params");
    int sub = 0;
    if (params.contains("sub_atoms")) {
      sub = integer(params.at("sub_atoms"), "params.sub_atoms");
      if (sub < 1) throw ValidationError("sub_atoms must be >= 1", "params.sub_atoms");
    }
    spec = PvfSpec::phi_diffusion(phi, sub);
  } else if (kind == "interaction") {
    spec = PvfSpec::interaction(kernel_from_json(member(params, "kernel", "params")));
  } else if (kind == "one_sided_ode") {
    spec = PvfSpec::one_sided_ode();
  } else {
    throw ValidationError("unknown pvf kind '" + kind + "'", "kind");
  }
  spec.declared_h1 = h1;
  return spec;
}

ParticleState particles_from_json(const json& j) {
  check_schema(j);
  ParticleState s;
  s.dim = dimension(j);
  const auto& positions = member(j, "positions", "");
  if (!positions.is_array() || positions.empty()) {
    throw ValidationError("expected a non-empty array", "positions");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const std::string where = "positions[" + std::to_string(i) + "]";
    Point p = point(positions[i], where);
    if (p.size() != s.dim) throw ValidationError("expected dim entries", where);
    s.positions.push_back(std::move(p));
  }
  return s;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<double>& times) {
  const int dim = traj.steps.front().dim();
  out << "t,atom_id";
  for (int d = 1; d <= dim; ++d) out << ",x_" << d;
  out << ",mass\n";
  for (double t : times) {
    const auto mu = interpolate(traj, t);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      out << format_double(t) << ',' << i;
      for (int d = 0; d < dim; ++d) out << ',' << format_double(mu[i].position[d]);
      out << ',' << format_double(mu[i].mass) << '\n';
    }
  }
}

json trajectory_json(const Trajectory& traj, const std::vector<double>& times) {
  json samples = json::array();
  for (double t : times) {
    json s = to_json(interpolate(traj, t));
    samples.push_back({{"t", t}, {"atoms", std::move(s["atoms"])}});
  }
  return {{"schema", 1},
          {"dim", traj.steps.front().dim()},
          {"n", traj.config.n_param},
          {"horizon", traj.config.horizon},
          {"pvf", to_string(traj.pvf.kind)},
          {"samples", std::move(samples)}};
}

std::string error_json(const std::string& kind, const std::string& message, const std::string& field) {
  json j = {{"error", kind}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  return j.dump();
}

}  // namespace mdelab::io
