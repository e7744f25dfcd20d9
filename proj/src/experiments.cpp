#include "extbandit/experiments.hpp"

#include "extbandit/core.hpp"

namespace extbandit {

TaskSpec builtin_experiment(int id) {
  TaskSpec task;
  switch (id) {
    case 1: {
      task.task_id = "exp1_pareto";
      for (double lambda : {2.1, 2.3, 1.3, 1.1, 1.9}) task.arms.push_back(ArmSpec::pareto(lambda));
      break;
    }
    case 2: {
      task.task_id = "exp2_exponential";
      for (double lambda : {2.1, 2.4, 1.9, 1.3, 1.1, 2.9, 1.5, 2.2, 2.6, 1.4})
        task.arms.push_back(ArmSpec::exponential(lambda));
      break;
    }
    case 3: {
      task.task_id = "exp3_gaussian";
      for (double sigma : {1.64, 2.29, 1.79, 2.67, 1.70, 1.36, 1.90, 2.19, 0.80, 0.12,
                           1.65, 1.19, 1.88, 0.89, 3.35, 1.5,  2.22, 3.03, 1.08, 0.48})
        task.arms.push_back(ArmSpec::gaussian(1.0, sigma));
      break;
    }
    case 4: {
      task.task_id = "exp4_power";
      const double shapes[] = {3.0, 4.0, 5.0, 5.0, 4.0};
      const double scales[] = {1.01, 1.01, 1.01, 1.1, 1.0};
      for (int i = 0; i < 5; ++i) task.arms.push_back(ArmSpec::power(shapes[i], scales[i]));
      break;
    }
    default:
      throw ConfigError("unknown experiment id " + std::to_string(id) + " (expected 1..4)");
  }
  return task;
}

}  // namespace extbandit
