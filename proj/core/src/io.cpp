#include "poslp/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace poslp {

namespace {

using nlohmann::json;

SparseRow parse_row(const json& jrow) {
  SparseRow row;
  row.rhs = jrow.at("rhs").get<double>();
  std::map<std::int32_t, double> acc;  // sums duplicates, sorts by column
  for (const auto& je : jrow.at("entries")) {
    if (!je.is_array() || je.size() != 2) throw ParseError("entry must be [column, coef]");
    const auto col = je[0].get<std::int64_t>();
    const auto coef = je[1].get<double>();
    if (col < 0) throw ParseError("negative column index");
    if (!(coef > 0.0)) throw ParseError("coefficients must be positive");
    acc[static_cast<std::int32_t>(col)] += coef;
  }
  row.entries.reserve(acc.size());
  for (const auto& [col, coef] : acc) row.entries.push_back({col, coef});
  return row;
}

void parse_system(const json& jrows, std::int32_t n, SparseConstraintSystem& sys) {
  sys.n = n;
  for (const auto& jrow : jrows) {
    SparseRow row = parse_row(jrow);
    for (const auto& e : row.entries) {
      if (e.column >= n) throw ParseError("column index out of range");
    }
    sys.rows.push_back(std::move(row));
  }
  sys.build_column_index();
}

json system_to_json(const SparseConstraintSystem& sys) {
  json jrows = json::array();
  for (const auto& row : sys.rows) {
    json jentries = json::array();
    for (const auto& e : row.entries) jentries.push_back({e.column, e.coef});
    jrows.push_back({{"rhs", row.rhs}, {"entries", std::move(jentries)}});
  }
  return jrows;
}

json counters_to_json(const SolveReport& r) {
  return json{{"increments", r.counters.increments},
              {"scalings", r.counters.scalings},
              {"work", r.counters.work_units},
              {"estimate_updates", r.counters.estimate_updates},
              {"u", r.diagnostics.u},
              {"potential_violations", r.diagnostics.potential_violations},
              {"z_below_quarter_u", r.diagnostics.z_below_quarter_u},
              {"topup_violations", r.diagnostics.topup_violations}};
}

}  // namespace

AnyInstance parse_instance(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "mpc") {
      MixedInstance inst;
      inst.n = j.at("n").get<std::int32_t>();
      if (inst.n <= 0) throw ParseError("n must be positive");
      parse_system(j.at("packing"), inst.n, inst.packing);
      parse_system(j.at("covering"), inst.n, inst.covering);
      return inst;
    }
    if (type == "cover") {
      CoveringInstance inst;
      const auto n = j.at("n").get<std::int32_t>();
      if (n <= 0) throw ParseError("n must be positive");
      inst.costs = j.at("costs").get<std::vector<double>>();
      if (static_cast<std::int32_t>(inst.costs.size()) != n) {
        throw ParseError("costs length must equal n");
      }
      parse_system(j.at("rows"), n, inst.system);
      return inst;
    }
    if (type == "fl") {
      FacilityInstance inst;
      inst.m_clients = j.at("clients").get<std::int32_t>();
      for (const auto& jf : j.at("facilities")) {
        inst.open_cost.push_back(jf.at("open").get<double>());
      }
      inst.n_facilities = static_cast<std::int32_t>(inst.open_cost.size());
      std::map<std::pair<std::int32_t, std::int32_t>, bool> seen;
      for (const auto& jp : j.at("pairs")) {
        if (!jp.is_array() || jp.size() != 3) throw ParseError("pair must be [client, facility, cost]");
        FacilityPair p;
        p.client = jp[0].get<std::int32_t>();
        p.facility = jp[1].get<std::int32_t>();
        p.cost = jp[2].get<double>();
        if (seen.count({p.client, p.facility}) != 0) {
          throw ParseError("duplicate (client, facility) pair");
        }
        seen[{p.client, p.facility}] = true;
        inst.pairs.push_back(p);
      }
      inst.build_adjacency();
      return inst;
    }
    throw ParseError("unknown instance type '" + type + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed instance: ") + e.what());
  }
}

AnyInstance read_instance_file(const std::string& path) {
  return parse_instance(read_text_file(path));
}

std::string instance_to_json(const MixedInstance& inst) {
  json j{{"type", "mpc"},
         {"n", inst.n},
         {"packing", system_to_json(inst.packing)},
         {"covering", system_to_json(inst.covering)}};
  return j.dump();
}

std::string instance_to_json(const CoveringInstance& inst) {
  json j{{"type", "cover"},
         {"n", inst.n()},
         {"costs", inst.costs},
         {"rows", system_to_json(inst.system)}};
  return j.dump();
}

std::string instance_to_json(const FacilityInstance& inst) {
  json jfac = json::array();
  for (double f : inst.open_cost) jfac.push_back({{"open", f}});
  json jpairs = json::array();
  for (const auto& p : inst.pairs) jpairs.push_back({p.client, p.facility, p.cost});
  json j{{"type", "fl"},
         {"facilities", std::move(jfac)},
         {"clients", inst.m_clients},
         {"pairs", std::move(jpairs)}};
  return j.dump();
}

std::string solution_to_json(const SolveReport& report, const FacilityInstance* fl) {
  json j;
  j["status"] = to_string(report.status);
  if (fl != nullptr) {
    json jx = json::array();
    for (std::size_t k = 0; k < report.x.size(); ++k) {
      const auto& p = fl->pairs[k];
      jx.push_back({p.client, p.facility, report.x[k]});
    }
    j["x"] = std::move(jx);
    j["y"] = report.y;
  } else {
    j["x"] = report.x;
  }
  if (std::isfinite(report.cost)) j["cost"] = report.cost;
  if (std::isfinite(report.lower_bound)) j["lower_bound"] = report.lower_bound;
  json cert;
  if (report.infeasibility) {
    const auto& c = *report.infeasibility;
    cert["type"] = "infeasibility";
    cert["epsilon"] = c.epsilon;
    cert["u"] = c.u;
    cert["x"] = c.x;
    cert["packing_weights"] = c.packing_weights;
    cert["covering_weights"] = c.covering_weights;
    cert["margins"] = c.margins;
  } else if (report.bound) {
    const auto& b = *report.bound;
    cert["type"] = "lower_bound";
    cert["epsilon"] = b.epsilon;
    cert["u"] = b.u;
    cert["lower_bound"] = b.lower_bound;
    cert["x_snapshot"] = b.x_snapshot;
    cert["lambda_star"] = {{"m", b.lambda_star_mantissa}, {"e", b.lambda_star_exp2}};
  }
  if (!cert.is_null()) j["certificate"] = std::move(cert);
  j["counters"] = counters_to_json(report);
  return j.dump();
}

ParsedSolution parse_solution(const std::string& json_text, const FacilityInstance* fl) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  ParsedSolution out;
  const std::string status = j.at("status").get<std::string>();
  if (status == "solved") out.status = SolveStatus::Solved;
  else if (status == "infeasible") out.status = SolveStatus::Infeasible;
  else if (status == "iteration_cap_exceeded") out.status = SolveStatus::IterationCapExceeded;
  else throw ParseError("unknown status '" + status + "'");

  if (j.contains("x")) {
    if (fl != nullptr) {
      out.x.assign(fl->pairs.size(), 0.0);
      std::size_t k = 0;
      for (const auto& jt : j["x"]) {
        if (k >= out.x.size()) throw ParseError("too many pair values");
        out.x[k++] = jt.at(2).get<double>();
      }
    } else {
      out.x = j["x"].get<std::vector<double>>();
    }
  }
  if (j.contains("y")) out.y = j["y"].get<std::vector<double>>();
  if (j.contains("certificate")) {
    const auto& cert = j["certificate"];
    const std::string type = cert.at("type").get<std::string>();
    if (type == "infeasibility") {
      InfeasibilityCertificate c;
      c.epsilon = cert.at("epsilon").get<double>();
      c.u = cert.at("u").get<double>();
      c.x = cert.at("x").get<std::vector<double>>();
      c.packing_weights = cert.at("packing_weights").get<std::vector<double>>();
      c.covering_weights = cert.at("covering_weights").get<std::vector<double>>();
      c.margins = cert.at("margins").get<std::vector<double>>();
      out.infeasibility = std::move(c);
    } else if (type == "lower_bound") {
      BoundWitness b;
      b.epsilon = cert.at("epsilon").get<double>();
      b.u = cert.at("u").get<double>();
      b.lower_bound = cert.at("lower_bound").get<double>();
      b.x_snapshot = cert.at("x_snapshot").get<std::vector<double>>();
      b.lambda_star_mantissa = cert.at("lambda_star").at("m").get<double>();
      b.lambda_star_exp2 = cert.at("lambda_star").at("e").get<std::int64_t>();
      out.bound = std::move(b);
    }
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace poslp
