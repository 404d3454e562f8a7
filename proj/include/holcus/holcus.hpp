#pragma once

#include <holcus/bench.hpp>
#include <holcus/circuit.hpp>
#include <holcus/errors.hpp>
#include <holcus/estimators.hpp>
#include <holcus/lcu.hpp>
#include <holcus/optimize.hpp>
#include <holcus/parallel.hpp>
#include <holcus/pauli.hpp>
#include <holcus/qaoa.hpp>
#include <holcus/qubo.hpp>
#include <holcus/random.hpp>
#include <holcus/statevector.hpp>
