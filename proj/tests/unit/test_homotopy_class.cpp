#include "finsler/errors.hpp"
#include "finsler/homotopy_class.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

using finsler::HomotopyClass;

TEST(HomotopyClass, ArithmeticIsComponentwise)
{
    const HomotopyClass a(2, -1), b(-3, 4);
    EXPECT_EQ(a + b, HomotopyClass(-1, 3));
    EXPECT_EQ(a - b, HomotopyClass(5, -5));
    EXPECT_EQ(-a, HomotopyClass(-2, 1));
    EXPECT_EQ(a.power(3), HomotopyClass(6, -3));
    EXPECT_TRUE(HomotopyClass::neutral(2).is_neutral());
    EXPECT_EQ(HomotopyClass::neutral(1).rank(), 1);
}

TEST(HomotopyClass, StrParseRoundTrip)
{
    for (const auto& c : {HomotopyClass(7), HomotopyClass(-12), HomotopyClass(3, -4), HomotopyClass(0, 0)})
        EXPECT_EQ(HomotopyClass::parse(c.str()), c);
    EXPECT_EQ(HomotopyClass(3, -4).str(), "3,-4");
    EXPECT_THROW(HomotopyClass::parse("1,x"), finsler::Error);
    EXPECT_THROW(HomotopyClass::parse(""), finsler::Error);
}

TEST(HomotopyClass, PairingIsLinearUnderPowers)
{
    finsler::testing::Gen g(11);
    for (int i = 0; i < 200; ++i) {
        const HomotopyClass h(g.integer(-50, 50), g.integer(-50, 50));
        const int m = g.integer(-20, 20);
        EXPECT_EQ(h.power(m).pairing(), m * h.pairing());
        EXPECT_EQ((h + h.power(m)).pairing(), (m + 1) * h.pairing());
    }
}

TEST(HomotopyClass, MixedRanksAreRejected)
{
    EXPECT_THROW(HomotopyClass(1) + HomotopyClass(1, 0), finsler::DomainError);
}
