#pragma once

#include <stdexcept>
#include <string>

namespace kakinuma {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConstraintViolation : public Error { using Error::Error; };
class SingularBorderedMatrix : public Error { using Error::Error; };
class DegenerateDenominator : public Error { using Error::Error; };
class NonZeroMean : public Error { using Error::Error; };
class CavitationError : public Error { using Error::Error; };
class IndexOutOfRange : public Error { using Error::Error; };
class SolverSingular : public Error { using Error::Error; };
class GaugeInconsistency : public Error { using Error::Error; };
class CompatibilityViolation : public Error { using Error::Error; };
class StepRejected : public Error { using Error::Error; };
class BelowNoiseFloor : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

}  // namespace kakinuma
