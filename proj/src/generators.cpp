#include "relavi/generators.hpp"

#include <map>

#include "relavi/errors.hpp"

namespace relavi {

std::shared_ptr<const ProblemInstance> make_fileworld_problem(
    std::shared_ptr<const DomainDef> domain, int n_files) {
  if (n_files < 1) throw ConfigError("fileworld problem needs at least one file");
  std::vector<std::pair<Name, Name>> objects;
  std::vector<Atom> goal;
  for (int i = 0; i < n_files; ++i) {
    Name p = "p" + std::to_string(i);
    objects.emplace_back(p, "file");
    goal.push_back({"filed", {p}});
  }
  return make_instance("fileworld-" + std::to_string(n_files), std::move(domain),
                       std::move(objects), {}, std::move(goal));
}

InstanceSampler fileworld_sampler(std::shared_ptr<const DomainDef> domain, int n_files) {
  return constant_sampler(make_fileworld_problem(std::move(domain), n_files));
}

}  // namespace relavi
