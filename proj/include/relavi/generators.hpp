#pragma once

#include <memory>

#include "relavi/domain.hpp"
#include "relavi/rollout.hpp"

namespace relavi {

/// Fileworld problem of the given size: files p0..p{n−1}, empty initial
/// state, goal = all files filed. Folder count is fixed by the domain's
/// constants.
std::shared_ptr<const ProblemInstance> make_fileworld_problem(
    std::shared_ptr<const DomainDef> domain, int n_files);

/// Sampler producing fileworld problems of a fixed size.
InstanceSampler fileworld_sampler(std::shared_ptr<const DomainDef> domain, int n_files);

}  // namespace relavi
