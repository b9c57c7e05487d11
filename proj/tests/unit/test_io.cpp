#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vnps/error.hpp"
#include "vnps/io.hpp"

using namespace vnps;

TEST(Container, MpsRoundTripIsBitExact) {
  const auto psi = canonicalize(random_mps(7, 6, 3), 2);
  const auto back = deserialize_mps(serialize(psi));
  ASSERT_EQ(back.size(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_EQ(back.tensor(i), psi.tensor(i));
  EXPECT_EQ(back.form().kind, CanonicalForm::Kind::center);
  EXPECT_EQ(back.form().center, 2u);
  EXPECT_EQ(inner(back, psi), inner(psi, psi));
}

TEST(Container, MpoRoundTrip) {
  const auto h = mpo_from_pauli_sum(test::random_pauli_sum(5, 12, 3, 8));
  const auto back = deserialize_mpo(serialize(h));
  ASSERT_EQ(back.size(), h.size());
  EXPECT_EQ(back.hermitian(), h.hermitian());
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_EQ(back.tensor(i).data, h.tensor(i).data);
}

TEST(Container, HeaderLayout) {
  const std::string bytes = serialize(basis_state({0, 1}));
  std::uint64_t len = 0;
  for (int b = 0; b < 8; ++b) len |= std::uint64_t{static_cast<unsigned char>(bytes[b])} << (8 * b);
  const std::string header = bytes.substr(8, len);
  EXPECT_NE(header.find("\"kind\":\"mps\""), std::string::npos);
  EXPECT_NE(header.find("\"bond_dims\":[1,1,1]"), std::string::npos);
  EXPECT_EQ(bytes.size(), 8 + len + 2 * 2 * 16);
}

TEST(Container, CorruptInputs) {
  EXPECT_THROW(deserialize_mps(""), FormatError);
  std::string bytes = serialize(random_mps(4, 2, 1));
  EXPECT_THROW(deserialize_mps(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(deserialize_mpo(bytes), FormatError);
  std::string bad = bytes;
  bad[0] = static_cast<char>(0xff);
  bad[7] = static_cast<char>(0x7f);
  EXPECT_THROW(deserialize_mps(bad), FormatError);
  std::string version = bytes;
  const auto at = version.find("\"version\":1");
  ASSERT_NE(at, std::string::npos);
  version[at + 10] = '9';
  EXPECT_THROW(deserialize_mps(version), FormatError);
}
