//! Centralized model evaluation on a held-out test set.

use crate::data::Dataset;
use crate::error::Result;
use crate::nn::{argmax, Model};

/// Batch size used when sweeping the test set; purely a throughput knob.
const EVAL_CHUNK: usize = 256;

/// Fraction of test samples whose predicted class matches the label.
///
/// Ties in the output distribution resolve to the lowest class index, and
/// the result is exact: correct-count divided by the set size.
pub fn evaluate_accuracy(model: &Model<f32>, test: &Dataset) -> Result<f64> {
    let ids: Vec<usize> = (0..test.len()).collect();
    let mut correct = 0usize;
    for chunk in ids.chunks(EVAL_CHUNK) {
        let (batch, labels) = test.gather(chunk);
        let probs = model.predict_proba(&batch)?;
        for (row, &label) in (0..probs.rows()).zip(labels.iter()) {
            if argmax(probs.row(row)) == label {
                correct += 1;
            }
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Architecture, Tensor};

    /// Fixed 20-sample, 2-feature, 3-class evaluation scenario with
    /// hand-scored predictions (12 mismatches -> accuracy 0.4).
    fn fixed_scenario() -> (Model<f32>, Dataset) {
        let x: [[f32; 2]; 20] = [
            [-1.695, 1.120],
            [-0.246, 0.894],
            [1.912, 0.154],
            [0.004, -1.712],
            [-0.926, -0.000],
            [0.717, 1.215],
            [-0.476, -1.736],
            [-0.847, 1.638],
            [-1.146, -0.192],
            [1.725, -1.900],
            [0.402, 1.801],
            [-1.079, 0.194],
            [1.637, -1.467],
            [0.094, 1.002],
            [0.676, -0.129],
            [-1.181, -0.037],
            [-0.510, -0.090],
            [-0.536, 1.352],
            [1.075, -0.744],
            [0.291, -0.896],
        ];
        let y: [usize; 20] = [1, 1, 0, 1, 2, 1, 1, 1, 1, 1, 2, 2, 2, 1, 2, 0, 0, 1, 1, 1];
        let data = x.iter().flatten().copied().collect::<Vec<f32>>();
        let samples = Tensor::new(vec![20, 2], data).unwrap();
        let dataset = Dataset::new(samples, y.to_vec(), 3).unwrap();

        let arch = Architecture::softmax_regression(&[2], 3).unwrap();
        let mut model = Model::<f32>::init(arch, 0);
        // Row-major W [3,2] then b [3].
        let flat = [0.9, -0.4, -0.3, 0.6, 0.2, 0.2, 0.1, 0.0, -0.1];
        model.params_mut().copy_from_flat(&flat).unwrap();
        (model, dataset)
    }

    #[test]
    fn fixed_model_scores_forty_percent() {
        let (model, data) = fixed_scenario();
        assert_eq!(evaluate_accuracy(&model, &data).unwrap(), 0.4);
    }

    #[test]
    fn zero_model_predicts_class_zero_everywhere() {
        let (mut model, data) = fixed_scenario();
        let zeros = vec![0.0f32; model.params().total_len()];
        model.params_mut().copy_from_flat(&zeros).unwrap();
        // All logits equal -> argmax tie -> class 0; the scenario has
        // three class-0 labels out of twenty.
        assert_eq!(evaluate_accuracy(&model, &data).unwrap(), 3.0 / 20.0);
    }

    #[test]
    fn chunking_does_not_change_the_count() {
        // More samples than one chunk: duplicate the scenario 30x (600
        // samples) and check the accuracy is unchanged.
        let (model, data) = fixed_scenario();
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..30 {
            for i in 0..data.len() {
                samples.extend_from_slice(data.samples().row(i));
                labels.push(data.labels()[i]);
            }
        }
        let big = Dataset::new(Tensor::new(vec![600, 2], samples).unwrap(), labels, 3).unwrap();
        assert_eq!(evaluate_accuracy(&model, &big).unwrap(), 0.4);
    }
}
