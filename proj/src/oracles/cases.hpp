#pragma once

#include "epf/oracles/harness.hpp"

#include <vector>

namespace epf::oracles {

void add_dataio_cases(std::vector<OracleCase>& cases);
void add_neural_cases(std::vector<OracleCase>& cases);
void add_featsel_cases(std::vector<OracleCase>& cases);
void add_models_cases(std::vector<OracleCase>& cases);
void add_eval_cases(std::vector<OracleCase>& cases);
void add_explain_cases(std::vector<OracleCase>& cases);

}  // namespace epf::oracles
