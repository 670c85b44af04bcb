#pragma once

#include <string>
#include <vector>

#include "bratteli/presentation.hpp"
#include "json.hpp"

namespace bratteli {

/// Builtin generators: point, convseq, cantor-interval, fan.
const std::vector<std::string>& example_names();

/// Throws std::invalid_argument for an unknown name or bad parameters.
QuotientPresentation make_example(const std::string& name, int horizon,
                                  const nlohmann::json& params = nlohmann::json::object());

/// One cell per row.
QuotientPresentation point_example(int horizon);

/// Two convergent sequences, born on rows 1 and 2, with glued limits. Each
/// row splits a block's tail cell into a new singleton and the next tail.
QuotientPresentation convseq_example(int horizon);

/// Binary dyadic refinement of [0,1]; adjacent cells touch.
QuotientPresentation cantor_interval_example(int horizon);

/// `blocks` convergent sequences (block b born on row b) whose limits are all
/// glued to one point. A representative of the quotient of a countable sum of
/// converging sequences; defaults to one block per row.
QuotientPresentation fan_example(int horizon, int blocks = 0);

/// Sequence generators: the limit of block b and its n-th isolated point.
PointSpec sequence_limit(const QuotientPresentation& p, int block);
PointSpec sequence_point(const QuotientPresentation& p, int block, int n);

/// Dyadic point a / 2^bits of the interval example approached from the left
/// (towards 0) or from the right.
PointSpec dyadic_point(int a, int bits, bool from_left);

/// Builtin sample used by the Glimm and classification checks.
std::vector<PointSpec> example_sample(const std::string& name, const QuotientPresentation& p);

/// Points of the fan sample at which the limits are glued.
std::vector<PointSpec> glued_points(const QuotientPresentation& p, int count);

}  // namespace bratteli
