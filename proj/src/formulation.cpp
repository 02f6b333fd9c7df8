#include "pioia/formulation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace pioia {

const char* to_string(FormulationVariant v) {
  switch (v) {
    case FormulationVariant::kF1: return "f1";
    case FormulationVariant::kF2: return "f2";
    case FormulationVariant::kF3: return "f3";
  }
  return "?";
}

FormulationVariant parse_variant(const std::string& text) {
  std::string s = text;
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "f1") return FormulationVariant::kF1;
  if (s == "f2") return FormulationVariant::kF2;
  if (s == "f3") return FormulationVariant::kF3;
  throw std::invalid_argument("unknown variant '" + text + "' (expected f1, f2 or f3)");
}

VariableIndex::VariableIndex(const UcInstance& inst, bool epigraph)
    : G_(static_cast<int>(inst.generators.size())),
      N_(static_cast<int>(inst.buses.size())),
      E_(static_cast<int>(inst.lines.size())),
      T_(inst.horizon) {
  int next = 0;
  auto block = [&next](int size) {
    const int start = next;
    next += size;
    return start;
  };
  u_ = block(G_ * T_);
  y_ = block(G_ * T_);
  z_ = block(G_ * T_);
  p_ = block(G_ * T_);
  pbar_ = block(G_ * T_);
  q_ = block(G_ * T_);
  pf_ = block(2 * E_ * T_);
  qf_ = block(2 * E_ * T_);
  cbus_ = block(N_ * T_);
  cline_ = block(E_ * T_);
  sline_ = block(E_ * T_);
  pu_ = block(N_ * T_);
  qu_ = block(N_ * T_);
  po_ = block(N_ * T_);
  qo_ = block(N_ * T_);
  psi_ = epigraph ? block(T_) : -1;
  total_ = next;
}

std::vector<int> VariableIndex::commitment_ids() const {
  std::vector<int> ids;
  for (int g = 0; g < G_; ++g) {
    const auto one = generator_commitment_ids(g);
    ids.insert(ids.end(), one.begin(), one.end());
  }
  return ids;
}

std::vector<int> VariableIndex::generator_commitment_ids(int g) const {
  std::vector<int> ids;
  for (int t = 0; t < T_; ++t) {
    ids.push_back(u(g, t));
    ids.push_back(y(g, t));
    ids.push_back(z(g, t));
  }
  return ids;
}

namespace {

// Row under construction: sum(terms) + constant (sense) 0.
struct RowBuilder {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  RowBuilder& add(int var, double coef) {
    if (coef != 0.0) terms.push_back({var, coef});
    return *this;
  }
  RowBuilder& shift(double c) {
    constant += c;
    return *this;
  }
  Row build(Sense sense, RowKind kind) const {
    return Row{terms, sense, -constant, kind};
  }
};

void add_commitment_rows(const UcInstance& inst, const VariableIndex& ix,
                         ModelSpec* spec) {
  const int T = inst.horizon;
  for (std::size_t gi = 0; gi < inst.generators.size(); ++gi) {
    const int g = static_cast<int>(gi);
    const Generator& gen = inst.generators[gi];
    for (int t = 0; t < T; ++t) {
      RowBuilder r;
      r.add(ix.y(g, t), 1.0).add(ix.z(g, t), -1.0).add(ix.u(g, t), -1.0);
      if (t == 0) {
        r.shift(gen.u0);
      } else {
        r.add(ix.u(g, t - 1), 1.0);
      }
      spec->add_row(r.build(Sense::kEqual, RowKind::kLogic));
    }
    for (int t = 0; t < T; ++t) {
      RowBuilder r;
      r.add(ix.y(g, t), 1.0).add(ix.z(g, t), 1.0).shift(-1.0);
      spec->add_row(r.build(Sense::kLessEqual, RowKind::kLogic));
    }
    if (!gen.thermal()) continue;

    const int L = std::min(gen.init_up_time, T);
    const int F = std::min(gen.init_down_time, T);
    const int up = gen.min_up;
    const int down = gen.min_down;
    if (L > 0) {
      RowBuilder r;
      for (int t = 0; t < L; ++t) r.add(ix.u(g, t), 1.0);
      r.shift(-L);
      spec->add_row(r.build(Sense::kEqual, RowKind::kMinUpDown));
    }
    if (up >= 1) {
      for (int s = L; s <= T - up; ++s) {
        RowBuilder r;
        for (int t = s; t < s + up; ++t) r.add(ix.u(g, t), 1.0);
        r.add(ix.y(g, s), -up);
        spec->add_row(r.build(Sense::kGreaterEqual, RowKind::kMinUpDown));
      }
      // A start too late for a full window keeps the unit on to the end.
      for (int s = std::max(0, T - up + 1); s < T; ++s) {
        RowBuilder r;
        for (int t = s; t < T; ++t) r.add(ix.u(g, t), 1.0);
        r.add(ix.y(g, s), -(T - s));
        spec->add_row(r.build(Sense::kGreaterEqual, RowKind::kMinUpDown));
      }
    }
    if (F > 0) {
      RowBuilder r;
      for (int t = 0; t < F; ++t) r.add(ix.u(g, t), 1.0);
      spec->add_row(r.build(Sense::kEqual, RowKind::kMinUpDown));
    }
    if (down >= 1) {
      for (int s = F; s <= T - down; ++s) {
        RowBuilder r;
        for (int t = s; t < s + down; ++t) r.add(ix.u(g, t), -1.0);
        r.add(ix.z(g, s), -down).shift(down);
        spec->add_row(r.build(Sense::kGreaterEqual, RowKind::kMinUpDown));
      }
      for (int s = std::max(0, T - down + 1); s < T; ++s) {
        RowBuilder r;
        for (int t = s; t < T; ++t) r.add(ix.u(g, t), -1.0);
        r.add(ix.z(g, s), -(T - s)).shift(T - s);
        spec->add_row(r.build(Sense::kGreaterEqual, RowKind::kMinUpDown));
      }
    }
  }
}

void add_unit_rows(const UcInstance& inst, const VariableIndex& ix,
                   ModelSpec* spec) {
  const int T = inst.horizon;
  for (std::size_t gi = 0; gi < inst.generators.size(); ++gi) {
    const int g = static_cast<int>(gi);
    const Generator& gen = inst.generators[gi];
    for (int t = 0; t < T; ++t) {
      spec->add_row(RowBuilder().add(ix.p(g, t), 1.0).add(ix.u(g, t), -gen.p_min)
                        .build(Sense::kGreaterEqual, RowKind::kDispatch));
      spec->add_row(RowBuilder().add(ix.p(g, t), 1.0).add(ix.u(g, t), -gen.p_max)
                        .build(Sense::kLessEqual, RowKind::kDispatch));
      spec->add_row(RowBuilder().add(ix.p(g, t), 1.0).add(ix.pbar(g, t), -1.0)
                        .build(Sense::kLessEqual, RowKind::kDispatch));
      spec->add_row(RowBuilder().add(ix.pbar(g, t), 1.0).add(ix.u(g, t), -gen.p_max)
                        .build(Sense::kLessEqual, RowKind::kDispatch));
      spec->add_row(RowBuilder().add(ix.q(g, t), 1.0).add(ix.u(g, t), -gen.q_min)
                        .build(Sense::kGreaterEqual, RowKind::kDispatch));
      spec->add_row(RowBuilder().add(ix.q(g, t), 1.0).add(ix.u(g, t), -gen.q_max)
                        .build(Sense::kLessEqual, RowKind::kDispatch));
    }
    if (!gen.thermal()) continue;
    for (int t = 0; t < T; ++t) {
      // Previous output and status: initial constants at t = 0.
      auto prev_p = [&](RowBuilder& r, double coef) {
        if (t == 0) {
          r.shift(coef * gen.p0);
        } else {
          r.add(ix.p(g, t - 1), coef);
        }
      };
      auto prev_u = [&](RowBuilder& r, double coef) {
        if (t == 0) {
          r.shift(coef * gen.u0);
        } else {
          r.add(ix.u(g, t - 1), coef);
        }
      };
      {
        RowBuilder r;
        r.add(ix.p(g, t), 1.0);
        prev_p(r, -1.0);
        prev_u(r, -gen.ramp_up);
        r.add(ix.y(g, t), -gen.ramp_startup);
        spec->add_row(r.build(Sense::kLessEqual, RowKind::kRamp));
      }
      {
        RowBuilder r;
        r.add(ix.pbar(g, t), 1.0);
        prev_p(r, -1.0);
        prev_u(r, -gen.ramp_up);
        r.add(ix.y(g, t), -gen.ramp_startup);
        spec->add_row(r.build(Sense::kLessEqual, RowKind::kRamp));
      }
      {
        RowBuilder r;
        prev_p(r, 1.0);
        r.add(ix.p(g, t), -1.0);
        prev_u(r, -gen.ramp_down);
        r.add(ix.z(g, t), -gen.ramp_shutdown);
        spec->add_row(r.build(Sense::kLessEqual, RowKind::kRamp));
      }
      {
        // No shutdown is modelled after the last period.
        RowBuilder r;
        r.add(ix.pbar(g, t), 1.0).add(ix.u(g, t), -gen.p_max);
        if (t + 1 < T) r.add(ix.z(g, t + 1), gen.p_max - gen.ramp_shutdown);
        spec->add_row(r.build(Sense::kLessEqual, RowKind::kRamp));
      }
    }
  }
  for (const auto& [area, req] : inst.reserve_table()) {
    const auto members = inst.area_members(area);
    for (int t = 0; t < T; ++t) {
      RowBuilder r;
      for (int g : members) r.add(ix.pbar(g, t), 1.0).add(ix.p(g, t), -1.0);
      r.shift(-req[t]);
      spec->add_row(r.build(Sense::kGreaterEqual, RowKind::kReserve));
    }
  }
}

void add_network_rows(const UcInstance& inst, const VariableIndex& ix,
                      ModelSpec* spec) {
  const int T = inst.horizon;
  for (std::size_t li = 0; li < inst.lines.size(); ++li) {
    const int l = static_cast<int>(li);
    const Line& line = inst.lines[li];
    const int a = inst.bus_index(line.from);
    const int b = inst.bus_index(line.to);
    const double G = line.g, B = line.b, sh = line.b_shunt;
    for (int t = 0; t < T; ++t) {
      const int c = ix.cline(l, t), s = ix.sline(l, t);
      for (int dir = 0; dir < 2; ++dir) {
        const int own = ix.cbus(dir == 0 ? a : b, t);
        const double ss = dir == 0 ? 1.0 : -1.0;  // s of this direction
        spec->add_row(RowBuilder()
                          .add(ix.pf(l, dir, t), 1.0)
                          .add(own, G).add(c, -G).add(s, B * ss)
                          .build(Sense::kEqual, RowKind::kFlow));
        spec->add_row(RowBuilder()
                          .add(ix.qf(l, dir, t), 1.0)
                          .add(own, -(B - sh)).add(s, G * ss).add(c, B)
                          .build(Sense::kEqual, RowKind::kFlow));
      }
    }
  }
  const auto pd = inst.p_demand();
  const auto qd = inst.q_demand();
  for (std::size_t ni = 0; ni < inst.buses.size(); ++ni) {
    const int n = static_cast<int>(ni);
    for (int t = 0; t < T; ++t) {
      RowBuilder rp, rq;
      for (std::size_t gi = 0; gi < inst.generators.size(); ++gi) {
        if (inst.bus_index(inst.generators[gi].bus) != n) continue;
        rp.add(ix.p(static_cast<int>(gi), t), 1.0);
        rq.add(ix.q(static_cast<int>(gi), t), 1.0);
      }
      rp.shift(-pd[n][t]).add(ix.pu(n, t), 1.0).add(ix.po(n, t), -1.0);
      rq.shift(-qd[n][t]).add(ix.qu(n, t), 1.0).add(ix.qo(n, t), -1.0);
      for (std::size_t li = 0; li < inst.lines.size(); ++li) {
        const Line& line = inst.lines[li];
        const int l = static_cast<int>(li);
        if (inst.bus_index(line.from) == n) {
          rp.add(ix.pf(l, 0, t), -1.0);
          rq.add(ix.qf(l, 0, t), -1.0);
        } else if (inst.bus_index(line.to) == n) {
          rp.add(ix.pf(l, 1, t), -1.0);
          rq.add(ix.qf(l, 1, t), -1.0);
        }
      }
      spec->add_row(rp.build(Sense::kEqual, RowKind::kBalance));
      spec->add_row(rq.build(Sense::kEqual, RowKind::kBalance));
    }
  }
}

}  // namespace

ModelSpec build_outer_base(const UcInstance& inst, FormulationVariant variant,
                           bool epigraph) {
  const VariableIndex ix(inst, epigraph);
  const int G = ix.num_gens(), N = ix.num_buses(), E = ix.num_lines();
  const int T = inst.horizon;
  const double cp = inst.penalty_cost();
  ModelSpec spec;
  spec.lower.assign(ix.num_vars(), 0.0);
  spec.upper.assign(ix.num_vars(), 0.0);
  spec.integer.assign(ix.num_vars(), false);
  spec.objective.assign(ix.num_vars(), 0.0);
  auto set = [&spec](int id, double lo, double hi, double cost) {
    spec.lower[id] = lo;
    spec.upper[id] = hi;
    spec.objective[id] = cost;
  };
  for (int g = 0; g < G; ++g) {
    const Generator& gen = inst.generators[g];
    for (int t = 0; t < T; ++t) {
      set(ix.u(g, t), 0.0, 1.0, gen.cost_fixed);
      set(ix.y(g, t), 0.0, 1.0, gen.cost_startup);
      set(ix.z(g, t), 0.0, 1.0, gen.cost_shutdown);
      for (int id : {ix.u(g, t), ix.y(g, t), ix.z(g, t)}) spec.integer[id] = true;
      set(ix.p(g, t), std::min(0.0, gen.p_min), std::max(0.0, gen.p_max),
          epigraph ? 0.0 : gen.cost_variable);
      set(ix.pbar(g, t), std::min(0.0, gen.p_min), std::max(0.0, gen.p_max), 0.0);
      set(ix.q(g, t), std::min(0.0, gen.q_min), std::max(0.0, gen.q_max), 0.0);
    }
  }
  for (int l = 0; l < E; ++l) {
    const Line& line = inst.lines[l];
    const double vv = inst.buses[inst.bus_index(line.from)].v_max *
                      inst.buses[inst.bus_index(line.to)].v_max;
    for (int t = 0; t < T; ++t) {
      for (int dir = 0; dir < 2; ++dir) {
        set(ix.pf(l, dir, t), -kInf, kInf, 0.0);
        set(ix.qf(l, dir, t), -kInf, kInf, 0.0);
      }
      set(ix.cline(l, t), -vv, vv, 0.0);
      set(ix.sline(l, t), -vv, vv, 0.0);
    }
  }
  const auto pd = inst.p_demand();
  const auto qd = inst.q_demand();
  const bool under = variant != FormulationVariant::kF1;
  const bool over = variant == FormulationVariant::kF3;
  const double slack_cost = epigraph ? 0.0 : cp;
  for (int n = 0; n < N; ++n) {
    const Bus& bus = inst.buses[n];
    for (int t = 0; t < T; ++t) {
      set(ix.cbus(n, t), bus.v_min * bus.v_min, bus.v_max * bus.v_max, 0.0);
      set(ix.pu(n, t), 0.0, under ? pd[n][t] : 0.0, slack_cost);
      set(ix.qu(n, t), 0.0, under ? qd[n][t] : 0.0, slack_cost);
      set(ix.po(n, t), 0.0, over ? kInf : 0.0, slack_cost);
      set(ix.qo(n, t), 0.0, over ? kInf : 0.0, slack_cost);
    }
  }
  add_commitment_rows(inst, ix, &spec);
  add_unit_rows(inst, ix, &spec);
  add_network_rows(inst, ix, &spec);
  if (epigraph) {
    for (int t = 0; t < T; ++t) {
      set(ix.psi(t), -kInf, kInf, 1.0);
      RowBuilder r;
      r.add(ix.psi(t), 1.0);
      for (int g = 0; g < G; ++g) r.add(ix.p(g, t), -inst.generators[g].cost_variable);
      for (int n = 0; n < N; ++n) {
        for (int id : {ix.pu(n, t), ix.qu(n, t), ix.po(n, t), ix.qo(n, t)}) {
          r.add(id, -cp);
        }
      }
      spec.add_row(r.build(Sense::kGreaterEqual, RowKind::kEpigraph));
    }
  }
  return spec;
}

std::vector<std::string> commitment_violations(const UcInstance& inst,
                                               const CommitmentSchedule& x) {
  std::vector<std::string> out;
  const int T = inst.horizon;
  const std::size_t G = inst.generators.size();
  if (x.u.size() != G || x.y.size() != G || x.z.size() != G) {
    out.push_back("schedule: generator count mismatch");
    return out;
  }
  for (std::size_t g = 0; g < G; ++g) {
    const Generator& gen = inst.generators[g];
    const std::string who = "generator " + std::to_string(gen.id);
    if (static_cast<int>(x.u[g].size()) != T || static_cast<int>(x.y[g].size()) != T ||
        static_cast<int>(x.z[g].size()) != T) {
      out.push_back(who + ": schedule length mismatch");
      continue;
    }
    auto u = [&](int t) { return t < 0 ? gen.u0 : x.u[g][t]; };
    for (int t = 0; t < T; ++t) {
      const std::string at = who + " t=" + std::to_string(t + 1);
      for (int v : {x.u[g][t], x.y[g][t], x.z[g][t]}) {
        if (v != 0 && v != 1) out.push_back(at + ": commitment values must be binary");
      }
      if (x.y[g][t] - x.z[g][t] != u(t) - u(t - 1)) {
        out.push_back(at + ": startup/shutdown logic y - z = u_t - u_{t-1} violated");
      }
      if (x.y[g][t] + x.z[g][t] > 1) out.push_back(at + ": y + z <= 1 violated");
    }
    if (!gen.thermal()) continue;
    const int L = std::min(gen.init_up_time, T);
    const int F = std::min(gen.init_down_time, T);
    for (int t = 0; t < L; ++t) {
      if (u(t) != 1) out.push_back(who + ": must stay on during the initial up time");
    }
    for (int t = 0; t < F; ++t) {
      if (u(t) != 0) out.push_back(who + ": must stay off during the initial down time");
    }
    for (int s = 0; s < T; ++s) {
      if (x.y[g][s] == 1 && s >= L) {
        for (int t = s; t < std::min(T, s + gen.min_up); ++t) {
          if (u(t) != 1) {
            out.push_back(who + ": minimum up time after the start at t=" + std::to_string(s + 1));
            break;
          }
        }
      }
      if (x.z[g][s] == 1 && s >= F) {
        for (int t = s; t < std::min(T, s + gen.min_down); ++t) {
          if (u(t) != 0) {
            out.push_back(who + ": minimum down time after the stop at t=" + std::to_string(s + 1));
            break;
          }
        }
      }
    }
  }
  return out;
}

void add_network_cones(const UcInstance& inst, const VariableIndex& ix, ModelSpec* spec) {
  for (int l = 0; l < ix.num_lines(); ++l) {
    const Line& line = inst.lines[l];
    const int a = inst.bus_index(line.from), b = inst.bus_index(line.to);
    for (int t = 0; t < inst.horizon; ++t) {
      const int caa = ix.cbus(a, t), cbb = ix.cbus(b, t);
      ConeRow soc;
      soc.members.push_back({{{caa, 1.0}, {cbb, 1.0}}, 0.0});
      soc.members.push_back({{{ix.cline(l, t), 2.0}}, 0.0});
      soc.members.push_back({{{ix.sline(l, t), 2.0}}, 0.0});
      soc.members.push_back({{{caa, 1.0}, {cbb, -1.0}}, 0.0});
      spec->cones.push_back(std::move(soc));
      for (int dir = 0; dir < 2; ++dir) {
        ConeRow cap;
        cap.members.push_back({{}, line.s_max});
        cap.members.push_back({{{ix.pf(l, dir, t), 1.0}}, 0.0});
        cap.members.push_back({{{ix.qf(l, dir, t), 1.0}}, 0.0});
        spec->cones.push_back(std::move(cap));
      }
    }
  }
}

ModelSpec build_inner(const UcInstance& inst, const CommitmentSchedule& schedule,
                      FormulationVariant variant) {
  const auto broken = commitment_violations(inst, schedule);
  if (!broken.empty()) {
    throw std::invalid_argument("inner model: " + broken.front());
  }
  const VariableIndex ix(inst, false);
  ModelSpec spec = build_outer_base(inst, variant, false);
  spec.integer.assign(spec.num_vars(), false);
  for (int g = 0; g < ix.num_gens(); ++g) {
    for (int t = 0; t < inst.horizon; ++t) {
      const std::pair<int, int> fixes[] = {{ix.u(g, t), schedule.u[g][t]},
                                           {ix.y(g, t), schedule.y[g][t]},
                                           {ix.z(g, t), schedule.z[g][t]}};
      for (const auto& [id, v] : fixes) {
        spec.lower[id] = spec.upper[id] = v;
      }
    }
  }
  add_network_cones(inst, ix, &spec);
  return spec;
}

CommitmentSchedule schedule_from_values(const UcInstance& inst,
                                        const VariableIndex& ix,
                                        const std::vector<double>& x) {
  CommitmentSchedule s;
  const int G = ix.num_gens(), T = inst.horizon;
  s.u.assign(G, std::vector<int>(T, 0));
  s.y = s.u;
  s.z = s.u;
  for (int g = 0; g < G; ++g) {
    for (int t = 0; t < T; ++t) {
      s.u[g][t] = static_cast<int>(std::lround(x[ix.u(g, t)]));
      s.y[g][t] = static_cast<int>(std::lround(x[ix.y(g, t)]));
      s.z[g][t] = static_cast<int>(std::lround(x[ix.z(g, t)]));
    }
  }
  return s;
}

double soc_residual(double c_nm, double s_nm, double c_nn, double c_mm) {
  return c_nm * c_nm + s_nm * s_nm - c_nn * c_mm;
}

double cap_residual(double p, double q, double s_max) {
  return p * p + q * q - s_max * s_max;
}

std::vector<KeyedResidual> soc_residuals(const UcInstance& inst,
                                         const VariableIndex& ix,
                                         const std::vector<double>& x) {
  std::vector<KeyedResidual> out;
  for (int l = 0; l < ix.num_lines(); ++l) {
    const int a = inst.bus_index(inst.lines[l].from);
    const int b = inst.bus_index(inst.lines[l].to);
    for (int t = 0; t < inst.horizon; ++t) {
      out.push_back({{l, 0, t},
                     soc_residual(x[ix.cline(l, t)], x[ix.sline(l, t)],
                                  x[ix.cbus(a, t)], x[ix.cbus(b, t)])});
    }
  }
  return out;
}

std::vector<KeyedResidual> cap_residuals(const UcInstance& inst,
                                         const VariableIndex& ix,
                                         const std::vector<double>& x) {
  std::vector<KeyedResidual> out;
  for (int l = 0; l < ix.num_lines(); ++l) {
    for (int dir = 0; dir < 2; ++dir) {
      for (int t = 0; t < inst.horizon; ++t) {
        out.push_back({{l, dir, t},
                       cap_residual(x[ix.pf(l, dir, t)], x[ix.qf(l, dir, t)],
                                    inst.lines[l].s_max)});
      }
    }
  }
  return out;
}

}  // namespace pioia
