#pragma once

#include <stdexcept>
#include <string>

namespace randpolar
{

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Bad user input: carries the JSON field path that failed validation.
class ConfigError : public Error
{
  public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + " " + what), path_(std::move(path))
    {
    }

    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

// A quantity that cannot be estimated with guarantees: unbounded polar with
// an infinite-mass measure, infinite integrals, rank-deficient inputs.
class InfeasibleError : public Error
{
  public:
    using Error::Error;
};

// Quadrature that did not converge, rejection sampler that hit its cap.
class NumericalError : public Error
{
  public:
    using Error::Error;
};

}  // namespace randpolar
