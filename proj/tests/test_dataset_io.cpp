#include <gtest/gtest.h>

#include <sstream>

#include "dimlab/dataset_io.hpp"
#include "dimlab/solvers.hpp"

using namespace dimlab;
using namespace dimlab::datagen;

namespace {

Dataset sample() {
    auto ds = sample_linsep(make_teacher(4, 3, 1), 12, 2);
    ds = append_related(ds, solvers::FrameSpec::repeat(4, 1));
    return append_unrelated(ds, NoiseSpec{NoiseSpec::GaussianIID{0.1}, 2}, 3);
}

void expect_same(const Dataset& a, const Dataset& b) {
    EXPECT_EQ(a.layout, b.layout);
    EXPECT_EQ(a.family, b.family);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_TRUE(a.inputs == b.inputs);
    EXPECT_TRUE(a.targets == b.targets);
    EXPECT_EQ(a.labels, b.labels);
}

} // namespace

TEST(Csv, RoundTripIsExact) {
    const auto ds = sample();
    std::stringstream ss;
    write_csv(ds, ss);
    const std::string text = ss.str();
    EXPECT_NE(text.find("minimal_0,minimal_1,minimal_2,minimal_3,unrelated_0,unrelated_1,related_0"), std::string::npos);
    EXPECT_NE(text.find("target_2,label"), std::string::npos);
    expect_same(read_csv(ss), ds);
}

TEST(Csv, RegressionHasNoLabelColumn) {
    const auto ds = make_corrupted_regression(CorruptedRegressionSpec{}, 5);
    std::stringstream ss;
    write_csv(ds, ss);
    const auto back = read_csv(ss);
    EXPECT_EQ(back.family, Family::CorruptedRegression);
    expect_same(back, ds);
}

TEST(Csv, RejectsMalformedInput) {
    std::stringstream bad1("minimal_0,target_0,label\n1,x,0\n");
    EXPECT_THROW(read_csv(bad1), Error);
    std::stringstream bad2("target_0,minimal_0\n1,2\n");
    EXPECT_THROW(read_csv(bad2), Error);
    std::stringstream bad3("minimal_0,target_0\n1\n");
    EXPECT_THROW(read_csv(bad3), Error);
}

TEST(Binary, RoundTripAndFingerprint) {
    const auto ds = sample();
    std::stringstream ss;
    write_binary(ds, 0xABCDEFULL, ss);
    const std::string bytes = ss.str();
    std::stringstream in(bytes);
    const auto back = read_binary(in, 0xABCDEFULL);
    EXPECT_EQ(back.fingerprint, 0xABCDEFULL);
    expect_same(back.dataset, ds);
    std::stringstream in2(bytes);
    try {
        read_binary(in2, 0x1234ULL);
        FAIL() << "fingerprint mismatch not detected";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Io);
    }
    std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW(read_binary(truncated), Error);
    std::stringstream junk("not a dataset at all");
    EXPECT_THROW(read_binary(junk), Error);
}

TEST(Binary, IdenticalInputsGiveIdenticalBytes) {
    std::stringstream a, b;
    write_binary(sample(), 1, a);
    write_binary(sample(), 1, b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(FormatReal, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 123456789.123})
        EXPECT_EQ(parse_real(format_real(v)), v);
    EXPECT_EQ(format_real(0.5), "0.5");
}
