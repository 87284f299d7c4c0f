#include "support.hpp"

#include <gtest/gtest.h>

namespace cm = clickmine;

TEST(Defaults, MatchShippedDataFiles)
{
    const std::filesystem::path dir = CLICKMINE_DATA_DIR;
    EXPECT_EQ(cm::read_file(dir / "bioportal.rules"), cm::defaults::rules);
    EXPECT_EQ(cm::read_file(dir / "useragent_blacklist.txt"), cm::defaults::useragent_blacklist);
    EXPECT_EQ(cm::read_file(dir / "ip_blacklist.txt"), cm::defaults::ip_blacklist);
    EXPECT_EQ(cm::read_file(dir / "asset_patterns.txt"), cm::defaults::asset_patterns);
    EXPECT_EQ(cm::read_file(dir / "archetypes.json"), cm::defaults::archetypes);
}

TEST(Defaults, Compile)
{
    EXPECT_NO_THROW((void)testing_support::default_filter());
    EXPECT_EQ(testing_support::default_rules().vocabulary().size(), 34u);
    EXPECT_EQ(testing_support::default_archetypes().size(), 7u);
}
