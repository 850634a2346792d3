#pragma once

#include <Eigen/Core>

namespace modeplan {

/// A_eq x = b_eq, A_ineq x >= b_ineq over a fixed column layout.
struct LinearSystem {
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd A_ineq;
    Eigen::VectorXd b_ineq;

    static LinearSystem with_columns(Eigen::Index cols) {
        LinearSystem s;
        s.A_eq.resize(0, cols);
        s.b_eq.resize(0);
        s.A_ineq.resize(0, cols);
        s.b_ineq.resize(0);
        return s;
    }

    Eigen::Index cols() const { return A_eq.cols(); }
    Eigen::Index num_eq() const { return A_eq.rows(); }
    Eigen::Index num_ineq() const { return A_ineq.rows(); }

    void add_eq(const Eigen::RowVectorXd& row, double rhs) {
        A_eq.conservativeResize(A_eq.rows() + 1, Eigen::NoChange);
        b_eq.conservativeResize(b_eq.size() + 1);
        A_eq.bottomRows(1) = row;
        b_eq(b_eq.size() - 1) = rhs;
    }
    void add_ineq(const Eigen::RowVectorXd& row, double rhs) {
        A_ineq.conservativeResize(A_ineq.rows() + 1, Eigen::NoChange);
        b_ineq.conservativeResize(b_ineq.size() + 1);
        A_ineq.bottomRows(1) = row;
        b_ineq(b_ineq.size() - 1) = rhs;
    }

    /// Places `block` at column `offset` of a system with `total_cols` columns.
    static LinearSystem embed(const LinearSystem& block, Eigen::Index offset, Eigen::Index total_cols) {
        LinearSystem s;
        s.A_eq = Eigen::MatrixXd::Zero(block.num_eq(), total_cols);
        s.A_eq.middleCols(offset, block.cols()) = block.A_eq;
        s.b_eq = block.b_eq;
        s.A_ineq = Eigen::MatrixXd::Zero(block.num_ineq(), total_cols);
        s.A_ineq.middleCols(offset, block.cols()) = block.A_ineq;
        s.b_ineq = block.b_ineq;
        return s;
    }

    /// Stacks rows of another system with the same columns.
    void append(const LinearSystem& other) {
        const Eigen::Index e = A_eq.rows(), i = A_ineq.rows();
        A_eq.conservativeResize(e + other.num_eq(), Eigen::NoChange);
        A_eq.bottomRows(other.num_eq()) = other.A_eq;
        b_eq.conservativeResize(e + other.num_eq());
        b_eq.tail(other.num_eq()) = other.b_eq;
        A_ineq.conservativeResize(i + other.num_ineq(), Eigen::NoChange);
        A_ineq.bottomRows(other.num_ineq()) = other.A_ineq;
        b_ineq.conservativeResize(i + other.num_ineq());
        b_ineq.tail(other.num_ineq()) = other.b_ineq;
    }
};

}  // namespace modeplan
