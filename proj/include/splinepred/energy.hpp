#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splinepred/linalg.hpp"

namespace splinepred {

/// Quadratic-form representations of the squared L2 norm of the natural
/// cubic spline through s(0..l):  int_0^l s(t)^2 dt = s^T M s = s^T S s.
struct EnergyMatrixPair {
  std::size_t level = 0;
  Matrix m;  // nonsymmetric, fixed by the block-order assembly convention
  Matrix s;  // symmetric part (M + M^T) / 2, the Gram matrix
};

/// Assembles M and S for knots 0..l.
///
/// The knot-value to derivative maps q = Q p, u = U p, v = V p come from the
/// natural-spline system. Each interval contributes
///   int_0^1 (p_i + q_i t + u_i t^2/2 + v_i t^3/6)^2 dt
/// whose monomial moments are 1/(a+b+1). Squares go on the diagonal block;
/// every cross term (a < b in the order p, q, u, v) is assigned entirely to
/// the (a, b) block with a on the row side. S is then (M + M^T) / 2.
EnergyMatrixPair assemble_energy(std::size_t l);

enum class FamilyId { M, M_T, M_INV, M_INV_T, S, S_INV };

inline constexpr std::array<FamilyId, 6> kAllFamilies{FamilyId::M,     FamilyId::M_T,
                                                      FamilyId::M_INV, FamilyId::M_INV_T,
                                                      FamilyId::S,     FamilyId::S_INV};

/// CLI tag: M, Mt, Minv, Minvt, S, Sinv.
std::string_view family_tag(FamilyId id);
std::optional<FamilyId> parse_family_tag(std::string_view tag);

/// Parametrization Theta = (Theta^(1), ..., Theta^(n)). `theta[l-1]` is the
/// (l+1)x(l+1) matrix at level l; `basis[l-1]` is its inverse B^(l).
struct ParamFamily {
  FamilyId id = FamilyId::M;
  std::vector<Matrix> theta;
  std::vector<Matrix> basis;
  std::vector<std::string> warnings;

  std::size_t max_level() const noexcept { return theta.size(); }
  const Matrix& at_level(std::size_t l) const { return theta.at(l - 1); }
  const Matrix& basis_at_level(std::size_t l) const { return basis.at(l - 1); }
};

/// Condition estimate above which a warning is recorded.
inline constexpr double kConditionWarning = 1e12;

/// Energy matrices and their inverses for levels 1..n, built once and shared
/// by every family derived from them.
class EnergyCache {
 public:
  explicit EnergyCache(std::size_t n);

  std::size_t max_level() const noexcept { return levels_.size(); }
  const EnergyMatrixPair& pair(std::size_t l) const { return levels_.at(l - 1).pair; }
  const Matrix& m_inverse(std::size_t l) const { return levels_.at(l - 1).m_inv; }
  const Matrix& s_inverse(std::size_t l) const { return levels_.at(l - 1).s_inv; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Theta^(l) and B^(l) for a family without further inversions.
  std::pair<Matrix, Matrix> theta_and_basis(FamilyId id, std::size_t l) const;

 private:
  struct Level {
    EnergyMatrixPair pair;
    Matrix m_inv;
    Matrix s_inv;
    std::vector<std::string> warnings;
  };
  std::vector<Level> levels_;
  std::vector<std::string> warnings_;
};

ParamFamily build_family(FamilyId id, std::size_t n);
ParamFamily build_family(FamilyId id, const EnergyCache& cache);

}  // namespace splinepred
