#include "finsler/homotopy_class.hpp"

#include "finsler/errors.hpp"

#include <sstream>

namespace finsler {

HomotopyClass HomotopyClass::neutral(int rank)
{
    return rank == 2 ? HomotopyClass(0, 0) : HomotopyClass(0);
}

HomotopyClass HomotopyClass::operator+(const HomotopyClass& o) const
{
    if (rank_ != o.rank_) throw DomainError("homotopy class rank mismatch");
    HomotopyClass r = *this;
    r.v_[0] += o.v_[0];
    r.v_[1] += o.v_[1];
    return r;
}

HomotopyClass HomotopyClass::operator-(const HomotopyClass& o) const { return *this + (-o); }

HomotopyClass HomotopyClass::operator-() const
{
    HomotopyClass r = *this;
    r.v_[0] = -r.v_[0];
    r.v_[1] = -r.v_[1];
    return r;
}

HomotopyClass HomotopyClass::power(std::int64_t m) const
{
    HomotopyClass r = *this;
    r.v_[0] *= m;
    r.v_[1] *= m;
    return r;
}

std::string HomotopyClass::str() const
{
    std::ostringstream os;
    os << v_[0];
    if (rank_ == 2) os << ',' << v_[1];
    return os.str();
}

HomotopyClass HomotopyClass::parse(const std::string& text)
{
    std::istringstream is(text);
    std::int64_t a = 0, b = 0;
    char sep = 0;
    const auto fail = [&] { return DomainError("cannot parse homotopy class '" + text + "'"); };
    if (!(is >> a)) throw fail();
    if (!(is >> sep)) return HomotopyClass(a);
    if (sep != ',' || !(is >> b)) throw fail();
    if (is >> sep) throw fail();
    return HomotopyClass(a, b);
}

} // namespace finsler
