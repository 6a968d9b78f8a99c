//! Synthetic worlds and reference models with analytically known FPVG
//! outcomes.
//!
//! Every generated question is eligible: each annotated box gets a detected
//! copy with IoU above 0.5, and at least one detection covers at most 25% of
//! every annotation. Randomness is seeded per question from the world seed,
//! so adding questions never changes earlier ones.
//!
//! Model kinds:
//!
//! - `GroundedOracle` answers from the set of relevant objects present in
//!   its input, and with the reserved token [`NULL_ANSWER`] when none is
//!   present. It is grounded on every question.
//! - `BlindPrior` answers from the question alone; identical under every
//!   condition.
//! - `UniformRandom` draws an answer per question and condition.
//! - `Mixed(α)` behaves as the oracle on a seeded α-fraction of questions
//!   and as the blind prior otherwise.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{coverage_fraction, iou, BoundingBox};
use crate::manifest::{Condition, Manifest};
use crate::record::{DetectionSet, PredictionRecord, PredictionRun, QuestionRecord};
use crate::relevance::{assign_relevance, RelevanceAssignment, RelevanceConfig};
use crate::{Error, Result};

/// Out-of-vocabulary answer of the grounded oracle when no relevant object is visible.
pub const NULL_ANSWER: &str = "∅";

/// Probability mass synthetic models put on their answer.
pub const PEAK_PROBABILITY: f64 = 0.9;

const REJECTION_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticWorldConfig {
    pub n_questions: usize,
    /// Inclusive range of detected objects per image.
    pub objects_per_image: (usize, usize),
    pub answer_vocab_size: usize,
    pub seed: u64,
    /// Image width and height in pixels.
    pub image_size: (u32, u32),
    /// Inclusive range of box side lengths in pixels.
    pub box_side: (u32, u32),
    /// Maximum annotated relevant boxes per question.
    pub max_annotations: usize,
}

impl Default for SyntheticWorldConfig {
    fn default() -> Self {
        Self {
            n_questions: 100,
            objects_per_image: (4, 12),
            answer_vocab_size: 16,
            seed: 7,
            image_size: (640, 480),
            box_side: (24, 160),
            max_annotations: 2,
        }
    }
}

impl SyntheticWorldConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.objects_per_image;
        if lo < 2 {
            return Err(Error::InfeasibleWorld("images need at least 2 objects (one relevant, one irrelevant)"));
        }
        if hi < lo {
            return Err(Error::InfeasibleWorld("objects_per_image range is empty"));
        }
        if self.answer_vocab_size == 0 {
            return Err(Error::InfeasibleWorld("answer vocabulary is empty"));
        }
        if self.max_annotations == 0 {
            return Err(Error::InfeasibleWorld("questions need at least one annotated box"));
        }
        let (bmin, bmax) = self.box_side;
        if bmin < 4 || bmax < bmin {
            return Err(Error::InfeasibleWorld("box sides must satisfy 4 <= min <= max"));
        }
        if bmax > self.image_size.0 || bmax > self.image_size.1 {
            return Err(Error::InfeasibleWorld("boxes larger than the image"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticWorld {
    pub config: SyntheticWorldConfig,
    pub questions: Vec<QuestionRecord>,
    pub detections: Vec<DetectionSet>,
    /// Relevance under the default thresholds, one per question.
    pub assignments: Vec<RelevanceAssignment>,
}

impl SyntheticWorld {
    pub fn vocabulary(&self) -> Vec<String> {
        (0..self.config.answer_vocab_size).map(vocab_word).collect()
    }
}

pub fn vocab_word(k: usize) -> String {
    format!("ans{k}")
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Platform-independent FNV-1a over a sequence of tagged parts.
#[derive(Debug, Clone, Copy)]
struct StableHash(u64);

impl StableHash {
    fn new(seed: u64) -> Self {
        let mut h = Self(0xcbf2_9ce4_8422_2325);
        h.u64(seed);
        h
    }

    fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
        // length terminator keeps ("ab","c") apart from ("a","bc")
        self.0 ^= bytes.len() as u64;
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        self
    }

    fn u64(&mut self, v: u64) -> &mut Self {
        self.bytes(&v.to_le_bytes())
    }

    fn finish(&self) -> u64 {
        splitmix64(self.0)
    }
}

fn question_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index as u64)))
}

fn random_box(rng: &mut ChaCha8Rng, cfg: &SyntheticWorldConfig) -> BoundingBox {
    let (w_img, h_img) = cfg.image_size;
    let w = rng.gen_range(cfg.box_side.0..=cfg.box_side.1);
    let h = rng.gen_range(cfg.box_side.0..=cfg.box_side.1);
    let x = rng.gen_range(0..=w_img - w);
    let y = rng.gen_range(0..=h_img - h);
    int_box(x as i64, y as i64, (x + w) as i64, (y + h) as i64).expect("positive sides")
}

fn int_box(x1: i64, y1: i64, x2: i64, y2: i64) -> Option<BoundingBox> {
    BoundingBox::new(x1 as f64, y1 as f64, x2 as f64, y2 as f64).ok()
}

/// A detection of `ann` with corners jittered by up to 8% of the side length.
fn jittered_copy(rng: &mut ChaCha8Rng, ann: &BoundingBox) -> BoundingBox {
    let jx = (ann.width() as i64 * 8 / 100).max(0);
    let jy = (ann.height() as i64 * 8 / 100).max(0);
    let c = ann.corners().map(|v| v as i64);
    for _ in 0..32 {
        let mut d = |j: i64| if j == 0 { 0 } else { rng.gen_range(-j..=j) };
        let (dx1, dy1, dx2, dy2) = (d(jx), d(jy), d(jx), d(jy));
        if let Some(b) = int_box(c[0] + dx1, c[1] + dy1, c[2] + dx2, c[3] + dy2) {
            if iou(&b, ann) > 0.5 {
                return b;
            }
        }
    }
    *ann
}

fn generate_question(cfg: &SyntheticWorldConfig, index: usize) -> Result<(QuestionRecord, DetectionSet)> {
    let mut rng = question_rng(cfg.seed, index);
    let n_objects = rng.gen_range(cfg.objects_per_image.0..=cfg.objects_per_image.1);
    let n_ann = rng.gen_range(1..=cfg.max_annotations.min(n_objects - 1));
    let annotations: Vec<BoundingBox> = (0..n_ann).map(|_| random_box(&mut rng, cfg)).collect();

    let mut boxes: Vec<BoundingBox> = annotations.iter().map(|a| jittered_copy(&mut rng, a)).collect();
    let clear_of_all = |b: &BoundingBox| annotations.iter().all(|a| coverage_fraction(b, a) <= 0.25);
    let irrelevant = (0..REJECTION_ATTEMPTS)
        .map(|_| random_box(&mut rng, cfg))
        .find(clear_of_all)
        .ok_or(Error::InfeasibleWorld("no box avoids 25% coverage of the annotations"))?;
    boxes.push(irrelevant);
    while boxes.len() < n_objects {
        boxes.push(random_box(&mut rng, cfg));
    }
    boxes.shuffle(&mut rng);

    let gold = vocab_word(rng.gen_range(0..cfg.answer_vocab_size));
    let image_id = format!("img{index:06}");
    Ok((
        QuestionRecord {
            question_id: format!("q{index:06}"),
            image_id: image_id.clone(),
            gold_answer: gold,
            relevant_boxes: annotations,
        },
        DetectionSet { image_id, boxes },
    ))
}

pub fn generate_world(cfg: &SyntheticWorldConfig) -> Result<SyntheticWorld> {
    cfg.validate()?;
    let relevance = RelevanceConfig::default();
    let mut questions = Vec::with_capacity(cfg.n_questions);
    let mut detections = Vec::with_capacity(cfg.n_questions);
    let mut assignments = Vec::with_capacity(cfg.n_questions);
    for index in 0..cfg.n_questions {
        let (q, d) = generate_question(cfg, index)?;
        let a = assign_relevance(&q, &d, &relevance)?;
        if !a.eligible {
            return Err(Error::InfeasibleWorld("generated question is not eligible"));
        }
        questions.push(q);
        detections.push(d);
        assignments.push(a);
    }
    Ok(SyntheticWorld {
        config: cfg.clone(),
        questions,
        detections,
        assignments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticModelKind {
    GroundedOracle,
    BlindPrior,
    UniformRandom,
    /// Grounded on a seeded fraction α of questions, blind otherwise.
    Mixed(f64),
}

impl SyntheticModelKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            SyntheticModelKind::Mixed(a) if !(0.0..=1.0).contains(a) => {
                Err(Error::InvalidParameter { name: "alpha", value: *a })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SyntheticModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntheticModelKind::GroundedOracle => f.write_str("grounded_oracle"),
            SyntheticModelKind::BlindPrior => f.write_str("blind_prior"),
            SyntheticModelKind::UniformRandom => f.write_str("uniform_random"),
            SyntheticModelKind::Mixed(a) => write!(f, "mixed({a})"),
        }
    }
}

/// Whether `Mixed(alpha)` behaves grounded on this question.
pub fn mixed_uses_grounding(model_seed: u64, question_id: &str, alpha: f64) -> bool {
    let h = StableHash::new(model_seed).bytes(b"mixed").bytes(question_id.as_bytes()).finish();
    let u = (h >> 11) as f64 / (1u64 << 53) as f64;
    u < alpha
}

fn peaked_distribution(answer: &str, vocab: &[String]) -> BTreeMap<String, f64> {
    let others = vocab.len() as f64;
    let floor = (1.0 - PEAK_PROBABILITY) / others;
    let mut dist: BTreeMap<String, f64> = vocab.iter().map(|w| (w.clone(), floor)).collect();
    dist.insert(String::from(NULL_ANSWER), floor);
    dist.insert(String::from(answer), PEAK_PROBABILITY);
    dist
}

/// Simulates a model on every manifest; returns one run per condition,
/// ordered by condition. Run labels are `"<kind>/<condition>"`.
pub fn run_model(
    kind: SyntheticModelKind,
    manifests: &[Manifest],
    world: &SyntheticWorld,
    model_seed: u64,
) -> Result<Vec<PredictionRun>> {
    kind.validate()?;
    let vocab = world.vocabulary();
    let relevant: BTreeMap<&str, &[usize]> = world
        .assignments
        .iter()
        .map(|a| (a.question_id.as_str(), a.relevant.as_slice()))
        .collect();
    let mut runs: BTreeMap<Condition, PredictionRun> = BTreeMap::new();
    for m in manifests {
        let rel = relevant.get(m.question_id.as_str()).ok_or_else(|| Error::UnknownQuestion {
            question_id: m.question_id.clone(),
        })?;
        let grounded = match kind {
            SyntheticModelKind::GroundedOracle => true,
            SyntheticModelKind::Mixed(alpha) => mixed_uses_grounding(model_seed, &m.question_id, alpha),
            _ => false,
        };
        let answer = if grounded {
            let present: BTreeSet<usize> = m.object_indices.iter().copied().filter(|i| rel.contains(i)).collect();
            if present.is_empty() {
                String::from(NULL_ANSWER)
            } else {
                let mut h = StableHash::new(model_seed);
                h.bytes(b"grounded").bytes(m.question_id.as_bytes());
                for i in &present {
                    h.u64(*i as u64);
                }
                vocab[(h.finish() % vocab.len() as u64) as usize].clone()
            }
        } else if kind == SyntheticModelKind::UniformRandom {
            let mut h = StableHash::new(model_seed);
            h.bytes(b"uniform").bytes(m.question_id.as_bytes()).bytes(m.condition.name().as_bytes());
            h.u64(m.condition.loo_index().map_or(u64::MAX, |k| k as u64));
            let mut rng = ChaCha8Rng::seed_from_u64(h.finish());
            vocab[rng.gen_range(0..vocab.len())].clone()
        } else {
            let h = StableHash::new(model_seed).bytes(b"blind").bytes(m.question_id.as_bytes()).finish();
            vocab[(h % vocab.len() as u64) as usize].clone()
        };
        let record = PredictionRecord::new(m.question_id.clone(), answer.clone())
            .with_distribution(peaked_distribution(&answer, &vocab));
        runs.entry(m.condition)
            .or_insert_with(|| PredictionRun::new(m.condition, format!("{kind}/{}", m.condition)))
            .insert(record);
    }
    Ok(runs.into_values().collect())
}
