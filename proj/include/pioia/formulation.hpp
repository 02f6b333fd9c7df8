// SOC-relaxed network-constrained unit commitment as ModelSpecs.
//
//   outer base  linear rows only (commitment logic, dispatch, ramps,
//               reserve, flow definitions, balances, slack bounds); the two
//               nonlinear families are left to cuts
//   inner       commitment fixed to a schedule, cones added, continuous
//
// Voltage products: c_nn per bus, one (c, s) pair per line oriented
// from -> to. The reverse direction reads s_mn = -s_nm, c_mn = c_nm.

#ifndef PIOIA_FORMULATION_HPP_
#define PIOIA_FORMULATION_HPP_

#include <string>
#include <vector>

#include "pioia/model.hpp"
#include "pioia/model_spec.hpp"

namespace pioia {

enum class FormulationVariant { kF1, kF2, kF3 };

const char* to_string(FormulationVariant v);
// "f1" / "f2" / "f3" (case-insensitive). Throws std::invalid_argument.
FormulationVariant parse_variant(const std::string& text);

class VariableIndex {
 public:
  VariableIndex(const UcInstance& inst, bool epigraph);

  int u(int g, int t) const { return u_ + g * T_ + t; }
  int y(int g, int t) const { return y_ + g * T_ + t; }
  int z(int g, int t) const { return z_ + g * T_ + t; }
  int p(int g, int t) const { return p_ + g * T_ + t; }
  int pbar(int g, int t) const { return pbar_ + g * T_ + t; }
  int q(int g, int t) const { return q_ + g * T_ + t; }
  // dir 0: from -> to, dir 1: to -> from.
  int pf(int l, int dir, int t) const { return pf_ + (l * 2 + dir) * T_ + t; }
  int qf(int l, int dir, int t) const { return qf_ + (l * 2 + dir) * T_ + t; }
  int cbus(int n, int t) const { return cbus_ + n * T_ + t; }
  int cline(int l, int t) const { return cline_ + l * T_ + t; }
  int sline(int l, int t) const { return sline_ + l * T_ + t; }
  int pu(int n, int t) const { return pu_ + n * T_ + t; }
  int qu(int n, int t) const { return qu_ + n * T_ + t; }
  int po(int n, int t) const { return po_ + n * T_ + t; }
  int qo(int n, int t) const { return qo_ + n * T_ + t; }
  // -1 without epigraph variables.
  int psi(int t) const { return psi_ < 0 ? -1 : psi_ + t; }

  int num_vars() const { return total_; }
  int horizon() const { return T_; }
  int num_gens() const { return G_; }
  int num_buses() const { return N_; }
  int num_lines() const { return E_; }
  bool epigraph() const { return psi_ >= 0; }
  // All u, y, z ids, generator-major.
  std::vector<int> commitment_ids() const;
  // The u, y, z ids of one generator over all periods.
  std::vector<int> generator_commitment_ids(int g) const;

 private:
  int G_, N_, E_, T_;
  int u_, y_, z_, p_, pbar_, q_, pf_, qf_, cbus_, cline_, sline_;
  int pu_, qu_, po_, qo_, psi_, total_;
};

// Linear relaxation base: every commitment id is flagged integer. With
// `epigraph`, dispatch and penalty cost of period t move into psi_t with
// psi_t >= (that cost) rows.
ModelSpec build_outer_base(const UcInstance& inst, FormulationVariant variant,
                           bool epigraph = false);

// Commitment fixed to `schedule`, cone rows added, no integrality. Throws
// std::invalid_argument naming the broken rule when the schedule violates
// the commitment constraints.
ModelSpec build_inner(const UcInstance& inst, const CommitmentSchedule& schedule,
                      FormulationVariant variant);

// Rotated-cone and capacity-disk rows for every line and period of `ix`.
void add_network_cones(const UcInstance& inst, const VariableIndex& ix, ModelSpec* spec);

// Violated commitment rules (logic, initial and minimum up/down), empty when
// the schedule is admissible.
std::vector<std::string> commitment_violations(const UcInstance& inst,
                                               const CommitmentSchedule& schedule);

// Reads a schedule from the commitment ids of `x` (rounded).
CommitmentSchedule schedule_from_values(const UcInstance& inst,
                                        const VariableIndex& index,
                                        const std::vector<double>& x);

// c_nm^2 + s_nm^2 - c_nn c_mm
double soc_residual(double c_nm, double s_nm, double c_nn, double c_mm);
// p^2 + q^2 - S^2
double cap_residual(double p, double q, double s_max);

struct LineKey {
  int line = 0;
  int dir = 0;  // 0 for soc keys
  int t = 0;
  bool operator<(const LineKey& o) const {
    if (line != o.line) return line < o.line;
    if (dir != o.dir) return dir < o.dir;
    return t < o.t;
  }
  bool operator==(const LineKey& o) const = default;
};

struct KeyedResidual {
  LineKey key;
  double value = 0.0;
};

std::vector<KeyedResidual> soc_residuals(const UcInstance& inst,
                                         const VariableIndex& index,
                                         const std::vector<double>& x);
std::vector<KeyedResidual> cap_residuals(const UcInstance& inst,
                                         const VariableIndex& index,
                                         const std::vector<double>& x);

}  // namespace pioia

#endif  // PIOIA_FORMULATION_HPP_
