#pragma once

#include <stdexcept>
#include <string>

namespace gfcstab {

/// Base class of everything the library throws on bad input or failed numerics.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
	using Error::Error;
};

/// A requested setpoint cannot be met by the power-angle curve.
class Infeasible : public Error {
public:
	Infeasible(const std::string& what, double p_set, double p_max)
		: Error(what), mPSet(p_set), mPMax(p_max) {}

	double p_set() const noexcept { return mPSet; }
	double p_max() const noexcept { return mPMax; }

private:
	double mPSet;
	double mPMax;
};

/// Non-finite state or an inconsistency that only roundoff could explain.
class NumericalError : public Error {
public:
	using Error::Error;
};

} // namespace gfcstab
