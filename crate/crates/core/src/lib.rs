//! Classical simulation of a variational quantum approximate support vector
//! machine: circuits, estimators, convex reference solvers, SPSA training and
//! inference transfer.

pub mod ansatz;
pub mod assembly;
pub mod basis;
pub mod circuit;
pub mod data;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod estimation;
pub mod feature_map;
pub mod gate;
pub mod linalg;
pub mod multiplexer;
pub mod oracle;
pub mod params;
pub mod reference;
pub mod rng;
pub mod scaling;
pub mod spsa;
pub mod statevector;

pub use circuit::{circuit_depth, gate_counts, projector_probability, Circuit, Register, RegisterMap};
pub use error::{Error, Result};
pub use gate::{Axis, Gate, GateKind};
pub use statevector::{apply_gate, StateVector};
pub use ansatz::{alpha_distribution, build_ansatz, AnsatzSpec};
pub use assembly::{build_decision_circuit, build_loss_circuit, build_regularization_circuit};
pub use dataset::{Dataset, TrainingSet};
pub use feature_map::{bloch_feature_map, zz_feature_map, FeatureMapKind, FeatureMapSpec};
pub use multiplexer::uniformly_controlled_rotation;
pub use oracle::{build_dataset_oracle, direct_oracle_state};
pub use params::{EstimatorConfig, Hyperparams, Mode, SimPath};
pub use reference::{
    brute_force_simplex_oracle, classical_decision, kernel_matrix, solve_dual_svm,
    solve_probability_simplex_qp, KernelMatrix, SolverResult,
};
pub use estimation::{
    estimate_decision, estimate_loss, estimate_objective, estimate_regularizer, DecisionEstimator,
    TrainingEstimator,
};
pub use spsa::{estimate_sigma, spsa_minimize, warm_start, OptimizationTrace, SpsaConfig};
pub use engine::{accuracy, infer, residual_loss, sign, train, train_with_warm_start, Inference, Model, TrainOutcome};
pub use data::{generate_bloch_toy, load_csv, preprocess, Balance, DatasetFile, PreprocessRules, RawTable, Scaling, Split, ToyDataset, ToyDatasetConfig};
pub use scaling::{linear_fit, loss_circuit_metrics, LinearFit, ScalingRow};
