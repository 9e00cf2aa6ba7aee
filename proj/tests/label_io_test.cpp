#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "generators.hpp"
#include "stateproj/label_io.hpp"

namespace stateproj {
namespace {

LabelFile parse(const std::string& text) {
    std::istringstream in(text);
    return read_label_file(in);
}

TEST(LabelIo, ReadsJumpList) {
    const LabelFile f = parse(
        "# format: jumps\n"
        "# horizon: 60\n"
        "# states: 3\n"
        "# initial: 1\n"
        "time,state\n"
        "5,2\n"
        "15.5,3\n");
    EXPECT_EQ(f.track.horizon(), 60.0);
    EXPECT_EQ(f.state_count, 3);
    EXPECT_FALSE(f.frequency.has_value());
    EXPECT_EQ(f.track.sequence(), StateSequence(1, {{5.0, 2}, {15.5, 3}}));
}

TEST(LabelIo, JumpAtZeroSetsInitialState) {
    const LabelFile f = parse("# horizon: 10\n# states: 2\n# initial: 1\n0,2\n4,1\n");
    EXPECT_EQ(f.track.sequence(), StateSequence(2, {{4.0, 1}}));
}

TEST(LabelIo, RoundTrip) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const LabelTrack t = testing::random_track(rng, 60.0, 40, 4);
        std::ostringstream out;
        write_label_file(out, t, 4);
        const LabelFile back = parse(out.str());
        EXPECT_EQ(back.state_count, 4);
        EXPECT_EQ(back.track.horizon(), t.horizon());
        ASSERT_EQ(back.track.sequence().jump_count(), t.sequence().jump_count());
        for (std::size_t k = 0; k < t.sequence().jump_count(); ++k) {
            EXPECT_NEAR(back.track.sequence().jumps()[k].time, t.sequence().jumps()[k].time, 1e-9);
            EXPECT_EQ(back.track.sequence().jumps()[k].state, t.sequence().jumps()[k].state);
        }
    }
}

TEST(LabelIo, SampledInput) {
    std::string text = "# format: sampled\n# frequency: 500\n# states: 3\nstate\n";
    // 10 s at 500 Hz: state 1 for 2 s, 3 for 3 s, 2 for the rest.
    for (int i = 0; i < 5000; ++i) {
        text += (i < 1000 ? "1\n" : i < 2500 ? "3\n" : "2\n");
    }
    const LabelFile f = parse(text);
    EXPECT_DOUBLE_EQ(f.track.horizon(), 10.0);
    EXPECT_EQ(f.samples, 5000u);
    ASSERT_TRUE(f.frequency.has_value());
    EXPECT_EQ(*f.frequency, 500.0);
    EXPECT_EQ(f.track.sequence(), StateSequence(1, {{2.0, 3}, {5.0, 2}}));
}

TEST(LabelIo, SampledFrequencyImpliesFormat) {
    const LabelFile f = parse("# frequency: 2\n1\n1\n2\n");
    EXPECT_DOUBLE_EQ(f.track.horizon(), 1.5);
    EXPECT_EQ(f.state_count, 2);
}

TEST(LabelIo, RejectsMalformedInput) {
    const char* bad[] = {
        "# horizon: 10\n# states: 2\n1,2\n",                       // no initial
        "# horizon: 10\n# states: 2\n# initial: 1\n5,3\n",         // state out of range
        "# horizon: 10\n# states: 2\n# initial: 1\n5,2\n3,1\n",    // unsorted
        "# horizon: 10\n# states: 2\n# initial: 1\n12,2\n",        // past horizon
        "# horizon: 10\n# states: 2\n# initial: 1\n5,2\nabc,1\n",  // garbage row
        "# horizon: 10\n# states: 2\n# initial: 1\n5\n",           // missing column
        "# horizon: -1\n# states: 2\n# initial: 1\n",              // bad horizon
        "# horizon: 10\n# states: 1\n# initial: 1\n",              // too few states
        "# format: sampled\n# states: 2\n1\n",                     // no frequency
        "# format: sampled\n# frequency: 0\n1\n",                  // bad frequency
        "# format: sampled\n# frequency: 5\n",                     // empty
        "# format: binary\n",                                      // unknown format
    };
    for (const char* text : bad) {
        EXPECT_THROW(parse(text), ParseError) << text;
    }
    EXPECT_THROW(load_label_file("/nonexistent/labels.csv"), ParseError);
}

TEST(LabelIo, TimesUseNineDecimals) {
    EXPECT_EQ(format_time(0.1), "0.100000000");
    EXPECT_EQ(format_time(59.999999999), "59.999999999");
}

}  // namespace
}  // namespace stateproj
