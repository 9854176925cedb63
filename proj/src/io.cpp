#include "relu2/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace relu2::io {

using nlohmann::json;

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

json affine_to_json(const AffineFunction& a) {
  json j;
  j["alpha"] = std::vector<double>(a.alpha.data(), a.alpha.data() + a.alpha.size());
  j["beta"] = a.beta;
  return j;
}

AffineFunction affine_from_json(const json& j) {
  const auto v = j.at("alpha").get<std::vector<double>>();
  AffineFunction a;
  a.alpha = Eigen::Map<const Vec>(v.data(), v.size());
  a.beta = j.at("beta").get<double>();
  return a;
}

json load_json(const std::string& path) {
  auto f = open_in(path);
  json j;
  f >> j;
  return j;
}

void dump_json(const json& j, const std::string& path) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

}  // namespace

Dataset read_dataset_csv(const std::string& path, bool header) {
  auto f = open_in(path);
  Dataset ds;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header && lineno == 1) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size())
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      vals.push_back(v);
    }
    if (vals.size() < 2)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": need at least x_1 and y");
    if (ds.points.empty()) ds.dim = static_cast<int>(vals.size()) - 1;
    if (static_cast<int>(vals.size()) != ds.dim + 1)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    LabeledPoint p;
    p.x = Eigen::Map<const Vec>(vals.data(), ds.dim);
    p.y = vals.back();
    ds.points.push_back(std::move(p));
  }
  ds.validate();
  return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path, bool header) {
  ds.validate();
  auto f = open_out(path);
  if (header) {
    for (int j = 0; j < ds.dim; ++j) f << "x" << (j + 1) << ",";
    f << "y\n";
  }
  for (const auto& p : ds.points) {
    for (int j = 0; j < ds.dim; ++j) f << format_real(p.x[j]) << ",";
    f << format_real(p.y) << "\n";
  }
}

void write_net_json(const TwoReluNet& net, const std::string& path) {
  json j;
  j["a1"] = affine_to_json(net.a1);
  j["a2"] = affine_to_json(net.a2);
  j["w1"] = net.w1;
  j["w2"] = net.w2;
  j["w0"] = net.w0;
  j["theta"] = net.theta;
  dump_json(j, path);
}

void write_net_json(const KReluNet& net, const std::string& path) {
  json j;
  j["nodes"] = json::array();
  for (const auto& nd : net.nodes) {
    json n;
    n["a"] = affine_to_json(nd.a);
    n["w"] = nd.w;
    j["nodes"].push_back(std::move(n));
  }
  j["w0"] = net.w0;
  j["theta"] = net.theta;
  dump_json(j, path);
}

AnyNet read_net_json(const std::string& path) {
  const json j = load_json(path);
  if (j.contains("a1")) {
    TwoReluNet net;
    net.a1 = affine_from_json(j.at("a1"));
    net.a2 = affine_from_json(j.at("a2"));
    net.w1 = j.at("w1").get<int>();
    net.w2 = j.at("w2").get<int>();
    net.w0 = j.at("w0").get<double>();
    net.theta = j.at("theta").get<double>();
    if (net.w1 * net.w1 != 1 || net.w2 * net.w2 != 1)
      throw std::runtime_error(path + ": network weights w1, w2 must be +1 or -1");
    return net;
  }
  KReluNet net;
  for (const auto& n : j.at("nodes")) {
    KReluNode nd;
    nd.a = affine_from_json(n.at("a"));
    nd.w = n.at("w").get<int>();
    if (nd.w * nd.w != 1) throw std::runtime_error(path + ": node weights must be +1 or -1");
    net.nodes.push_back(std::move(nd));
  }
  net.w0 = j.at("w0").get<double>();
  net.theta = j.at("theta").get<double>();
  return net;
}

reduce::SeparabilityInstance read_instance_json(const std::string& path) {
  const json j = load_json(path);
  reduce::SeparabilityInstance inst;
  for (const auto& row : j.at("points")) {
    const auto v = row.get<std::vector<double>>();
    inst.points.push_back(Eigen::Map<const Vec>(v.data(), v.size()));
  }
  if (inst.points.empty()) throw std::runtime_error(path + ": no points");
  inst.dim = static_cast<int>(inst.points.front().size());
  inst.s1 = j.at("S1").get<std::vector<int>>();
  inst.s0 = j.at("S0").get<std::vector<int>>();
  if (j.contains("shift")) {
    const auto v = j.at("shift").get<std::vector<double>>();
    inst.shift = Eigen::Map<const Vec>(v.data(), v.size());
  }
  inst.validate();
  return inst;
}

void write_instance_json(const reduce::SeparabilityInstance& inst, const std::string& path) {
  inst.validate();
  json j;
  j["points"] = json::array();
  for (const auto& p : inst.points)
    j["points"].push_back(std::vector<double>(p.data(), p.data() + p.size()));
  j["S1"] = inst.s1;
  j["S0"] = inst.s0;
  if (inst.shift)
    j["shift"] = std::vector<double>(inst.shift->data(), inst.shift->data() + inst.shift->size());
  dump_json(j, path);
}

reduce::HardSortWitness read_hardsort_json(const std::string& path) {
  const json j = load_json(path);
  reduce::HardSortWitness w;
  w.l1 = affine_from_json(j.at("l1"));
  w.l2 = affine_from_json(j.at("l2"));
  w.w1 = j.at("w1").get<int>();
  w.w2 = j.at("w2").get<int>();
  w.c = j.at("c").get<double>();
  const std::string side = j.at("side").get<std::string>();
  if (side == "above") w.side = reduce::HardSortSide::Above;
  else if (side == "below") w.side = reduce::HardSortSide::Below;
  else throw std::runtime_error(path + ": side must be 'above' or 'below'");
  return w;
}

void write_hardsort_json(const reduce::HardSortWitness& w, const std::string& path) {
  json j;
  j["l1"] = affine_to_json(w.l1);
  j["l2"] = affine_to_json(w.l2);
  j["w1"] = w.w1;
  j["w2"] = w.w2;
  j["c"] = w.c;
  j["side"] = w.side == reduce::HardSortSide::Above ? "above" : "below";
  dump_json(j, path);
}

reduce::TwoPlaneWitness read_plane_witness_json(const std::string& path) {
  const json j = load_json(path);
  reduce::TwoPlaneWitness w;
  w.plane1 = affine_from_json(j.at("plane1"));
  w.plane2 = affine_from_json(j.at("plane2"));
  return w;
}

void write_plane_witness_json(const reduce::TwoPlaneWitness& w, const std::string& path) {
  json j;
  j["plane1"] = affine_to_json(w.plane1);
  j["plane2"] = affine_to_json(w.plane2);
  dump_json(j, path);
}

std::string file_digest_hex(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  uint64_t h = 1469598103934665603ULL;
  char c;
  while (f.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace relu2::io
