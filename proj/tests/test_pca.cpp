#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "imugest/jacobi.hpp"
#include "imugest/pca.hpp"
#include "imugest/rng.hpp"
#include "oracles.hpp"

using namespace imugest;

namespace {

FeatureMatrix random_features(RandomStream& rng, std::size_t m, std::size_t d) {
    FeatureMatrix fm;
    fm.values = Mat(m, d);
    for (std::size_t c = 0; c < d; ++c) {
        const double offset = rng.uniform(-3.0, 3.0);
        const double scale = rng.uniform(0.1, 5.0);
        for (std::size_t r = 0; r < m; ++r) fm.values(r, c) = offset + scale * rng.normal();
    }
    for (std::size_t c = 0; c < d; ++c) fm.column_names.push_back("c" + std::to_string(c));
    fm.labels.assign(m, 0);
    return fm;
}

// covariance of the standardized training matrix, recomputed from scratch
Mat standardized_covariance(const FeatureMatrix& fm, const PcaModel& model) {
    const std::size_t m = fm.rows();
    const std::size_t d = fm.cols();
    Mat z(m, d);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < d; ++c)
            z(r, c) = (fm.values(r, c) - model.column_means[c]) / model.column_scales[c];
    Mat cov(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < m; ++r) s += z(r, i) * z(r, j);
            cov(i, j) = s / static_cast<double>(m - 1);
        }
    return cov;
}

} // namespace

TEST_CASE("full-rank decomposition is orthonormal, consistent and lossless") {
    RandomStream rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 50, d = 12;
        const FeatureMatrix fm = random_features(rng, m, d);
        const PcaModel model = fit_pca(fm, d);
        INFO("trial " << trial);

        // orthonormal component columns
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < d; ++i)
                    dot += model.components(i, a) * model.components(i, b);
                CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) <= 1e-8);
            }

        // each component solves the eigenproblem of the standardized covariance
        const Mat cov = standardized_covariance(fm, model);
        double cov_norm = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) cov_norm += cov(i, j) * cov(i, j);
        cov_norm = std::sqrt(cov_norm);
        for (std::size_t k = 0; k < d; ++k) {
            double residual = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                double cv = 0.0;
                for (std::size_t j = 0; j < d; ++j) cv += cov(i, j) * model.components(j, k);
                const double diff = cv - model.eigenvalues[k] * model.components(i, k);
                residual += diff * diff;
            }
            CHECK(std::sqrt(residual) <= 1e-8 * cov_norm);
        }

        // eigenvalues descending
        for (std::size_t k = 1; k < d; ++k)
            CHECK(model.eigenvalues[k - 1] >= model.eigenvalues[k] - 1e-12);

        // full-rank projection loses nothing: undo the rotation and scaling
        const FeatureMatrix scores = pca_transform(model, fm);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t i = 0; i < d; ++i) {
                double recon = 0.0;
                for (std::size_t k = 0; k < d; ++k)
                    recon += model.components(i, k) * scores.values(r, k);
                recon = recon * model.column_scales[i] + model.column_means[i];
                CHECK(std::fabs(recon - fm.values(r, i)) <= 1e-8);
            }

        // projected training covariance is diagonal with the eigenvalues on it
        FeatureMatrix score_fm = scores;
        const std::size_t l = d;
        for (std::size_t a = 0; a < l; ++a)
            for (std::size_t b = 0; b < l; ++b) {
                double s = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    double za = score_fm.values(r, a);
                    double zb = score_fm.values(r, b);
                    s += za * zb;
                }
                s /= static_cast<double>(m - 1);
                const double expected = a == b ? model.eigenvalues[a] : 0.0;
                CHECK(std::fabs(s - expected) <= 1e-8 * (1.0 + std::fabs(model.eigenvalues[0])));
            }
    }
}

TEST_CASE("eigenvalues agree with an independent QR-iteration solver") {
    RandomStream rng(515);
    for (int trial = 0; trial < 10; ++trial) {
        const FeatureMatrix fm = random_features(rng, 50, 8);
        const PcaModel model = fit_pca(fm, 8);
        const std::vector<double> reference =
            oracle::qr_eigenvalues(standardized_covariance(fm, model));
        REQUIRE(reference.size() == model.eigenvalues.size());
        for (std::size_t k = 0; k < reference.size(); ++k) {
            INFO("trial " << trial << " eigenvalue " << k);
            CHECK(oracle::rel_close(model.eigenvalues[k], reference[k], 1e-6));
        }
    }
}

TEST_CASE("truncated projection keeps the requested dimensions") {
    RandomStream rng(99);
    const FeatureMatrix fm = random_features(rng, 40, 9);
    const PcaModel model = fit_pca(fm, 3);
    CHECK(model.components.rows() == 9);
    CHECK(model.components.cols() == 3);
    CHECK(model.eigenvalues.size() == 3);

    const FeatureMatrix scores = pca_transform(model, fm);
    CHECK(scores.rows() == 40);
    CHECK(scores.cols() == 3);
    CHECK(scores.labels == fm.labels);

    // the training mean maps to the origin
    std::vector<double> mean_row(9);
    for (std::size_t c = 0; c < 9; ++c) mean_row[c] = model.column_means[c];
    for (const double v : pca_transform_row(model, mean_row)) CHECK(std::fabs(v) <= 1e-12);

    // truncation beyond the valid range is refused
    CHECK_THROWS(fit_pca(fm, 0));
    CHECK_THROWS(fit_pca(fm, 10));
}

TEST_CASE("zero-variance columns are rejected with the column named") {
    RandomStream rng(7);
    FeatureMatrix fm = random_features(rng, 30, 4);
    for (std::size_t r = 0; r < fm.rows(); ++r) fm.values(r, 2) = 5.0;
    CHECK_THROWS_WITH(fit_pca(fm, 2), Catch::Matchers::ContainsSubstring("c2"));
}

TEST_CASE("rotation solver handles exact and random symmetric matrices") {
    Mat diag(3, 3);
    diag(0, 0) = 5.0;
    diag(1, 1) = -1.0;
    diag(2, 2) = 2.0;
    const SymmetricEigen eig = jacobi_eigensymm(diag);
    REQUIRE(eig.eigenvalues.size() == 3);
    CHECK(eig.eigenvalues[0] == Catch::Approx(5.0));
    CHECK(eig.eigenvalues[1] == Catch::Approx(2.0));
    CHECK(eig.eigenvalues[2] == Catch::Approx(-1.0));

    Mat two(2, 2);
    two(0, 0) = 2.0;
    two(0, 1) = 1.0;
    two(1, 0) = 1.0;
    two(1, 1) = 2.0;
    const SymmetricEigen e2 = jacobi_eigensymm(two);
    CHECK(e2.eigenvalues[0] == Catch::Approx(3.0));
    CHECK(e2.eigenvalues[1] == Catch::Approx(1.0));
}
