//! Seeded generator of labeled synthetic triage datasets.
//!
//! Stands in for private hospital data at desk scale. Positive records
//! receive planted, knob-controlled effects: a temperature shift for UTI,
//! a reduced weight-for-age profile for pneumonia, and condition-linked
//! medication tokens at an elevated rate. Everything else is drawn
//! identically for both classes, so zeroing the knobs produces data with
//! no learnable signal.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Condition, Dataset, Gender, Label, LabeledRecord, TriageRecord};
use crate::error::{Error, Result};
use crate::rng::{seeded, std_normal};

/// Medication tokens planted for positive records, per condition.
pub fn signal_tokens(condition: Condition) -> [&'static str; 3] {
    match condition {
        Condition::Pneumonia => ["salbutamol", "fluticasone", "amoxicillin"],
        Condition::Uti => ["cephalexin", "polyethylene-glycol", "trimethoprim"],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub condition: Condition,
    pub n: usize,
    pub prevalence: f64,
    /// Added to the body temperature of UTI positives (degrees C).
    pub temp_shift_c: f64,
    /// Multiplies the age-expected weight of pneumonia positives.
    pub weight_factor: f64,
    pub signal_token_prob_pos: f64,
    pub signal_token_prob_neg: f64,
    pub missing_rate: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(condition: Condition, n: usize, seed: u64) -> Self {
        GeneratorConfig {
            condition,
            n,
            prevalence: 0.06,
            temp_shift_c: 1.5,
            weight_factor: 0.6,
            signal_token_prob_pos: 0.5,
            signal_token_prob_neg: 0.05,
            missing_rate: 0.1,
            seed,
        }
    }

    /// The same configuration with every planted effect switched off.
    pub fn null_signal(mut self) -> Self {
        self.temp_shift_c = 0.0;
        self.weight_factor = 1.0;
        self.signal_token_prob_pos = self.signal_token_prob_neg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::BadConfig(format!("n must be >= 10, got {}", self.n)));
        }
        if !(self.prevalence > 0.0 && self.prevalence < 1.0) {
            return Err(Error::BadConfig(format!(
                "prevalence must be in (0, 1), got {}",
                self.prevalence
            )));
        }
        for (name, p) in [
            ("signal_token_prob_pos", self.signal_token_prob_pos),
            ("signal_token_prob_neg", self.signal_token_prob_neg),
            ("missing_rate", self.missing_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::BadConfig(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if !(self.weight_factor > 0.0 && self.weight_factor.is_finite()) {
            return Err(Error::BadConfig(format!(
                "weight_factor must be positive, got {}",
                self.weight_factor
            )));
        }
        if !self.temp_shift_c.is_finite() {
            return Err(Error::BadConfig("temp_shift_c must be finite".to_string()));
        }
        Ok(())
    }
}

/// Generate a dataset. Each record derives from its own sub-generator
/// keyed by (seed, index), so output is reproducible record by record.
pub fn generate(config: &GeneratorConfig) -> Result<Dataset> {
    config.validate()?;
    let records = (0..config.n)
        .map(|i| {
            let mut rng = seeded(config.seed, 0x9e0_0000 + i as u64);
            generate_record(config, &mut rng)
        })
        .collect();
    Ok(Dataset::new(config.condition, records))
}

fn generate_record(config: &GeneratorConfig, rng: &mut ChaCha8Rng) -> LabeledRecord {
    let positive = rng.random_bool(config.prevalence);
    let age_months: f64 = rng.random_range(1.0..204.0);

    let gender_roll: f64 = rng.random();
    let gender = if gender_roll < 0.48 {
        Gender::M
    } else if gender_roll < 0.96 {
        Gender::F
    } else {
        Gender::U
    };

    let ctas_roll: f64 = rng.random();
    let ctas = match ctas_roll {
        r if r < 0.05 => 1,
        r if r < 0.20 => 2,
        r if r < 0.60 => 3,
        r if r < 0.90 => 4,
        _ => 5,
    };

    let method_roll: f64 = rng.random();
    let arrival_method = if method_roll < 0.20 {
        "ambulance"
    } else if method_roll < 0.95 {
        "walk_in"
    } else {
        "referral"
    }
    .to_string();
    let arrival_hour = rng.random_range(0..24u8);
    let arrival_weekday = rng.random_range(0..7u8);
    let arrival_month = rng.random_range(1..13u8);

    // Vitals, conditioned on age. Every draw happens for every record so
    // the stream layout is label-independent.
    let capped_age = age_months.min(200.0);
    let expected_weight = if age_months <= 12.0 {
        3.5 + 0.5 * age_months
    } else {
        9.5 + 0.2 * (age_months - 12.0)
    };
    let mut weight = expected_weight * (0.12 * std_normal(rng)).exp();
    if positive && config.condition == Condition::Pneumonia {
        weight *= config.weight_factor;
    }
    let mut temp = (37.0 + 0.45 * std_normal(rng)).clamp(35.0, 41.5);
    if positive && config.condition == Condition::Uti {
        temp = (temp + config.temp_shift_c).clamp(35.0, 43.0);
    }
    let pulse = (150.0 - 0.35 * capped_age + 12.0 * std_normal(rng)).clamp(50.0, 220.0);
    let resp_rate = (40.0 - 0.12 * capped_age + 4.0 * std_normal(rng)).clamp(8.0, 80.0);
    let systolic = (85.0 + 0.15 * capped_age + 8.0 * std_normal(rng)).clamp(50.0, 180.0);
    let diastolic = (50.0 + 0.09 * capped_age + 6.0 * std_normal(rng)).clamp(30.0, 120.0);

    let note_len = rng.random_range(10..=25usize);
    let notes = (0..note_len)
        .map(|_| NOTE_WORDS[rng.random_range(0..NOTE_WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ");

    let mut medications: Vec<String> = Vec::new();
    let med_count = rng.random_range(0..=3usize);
    for _ in 0..med_count {
        medications.push(NEUTRAL_MEDS[rng.random_range(0..NEUTRAL_MEDS.len())].to_string());
    }
    let signal_prob = if positive {
        config.signal_token_prob_pos
    } else {
        config.signal_token_prob_neg
    };
    for token in signal_tokens(config.condition) {
        if rng.random_bool(signal_prob) {
            medications.push(token.to_string());
        }
    }

    let symptom_count = rng.random_range(1..=4usize);
    let symptoms: Vec<String> = (0..symptom_count)
        .map(|_| SYMPTOM_WORDS[rng.random_range(0..SYMPTOM_WORDS.len())].to_string())
        .collect();

    // Missingness over the optional vitals, applied last.
    let missing = |rng: &mut ChaCha8Rng, v: f64| {
        if rng.random_bool(config.missing_rate) {
            None
        } else {
            Some(v)
        }
    };
    let weight_kg = missing(rng, weight);
    let systolic_bp = missing(rng, systolic);
    let diastolic_bp = missing(rng, diastolic);
    let resp = missing(rng, resp_rate);
    let temp_c = missing(rng, temp);
    let pulse_opt = missing(rng, pulse);

    let record = TriageRecord {
        notes,
        medications,
        symptoms,
        age_months,
        weight_kg,
        systolic_bp,
        diastolic_bp,
        resp_rate: resp,
        temp_c,
        pulse: pulse_opt,
        ctas,
        arrival_method,
        arrival_hour,
        arrival_weekday,
        arrival_month,
        gender,
    };
    debug_assert!(record.validate().is_ok());
    LabeledRecord {
        record,
        label: if positive { Label::Positive } else { Label::Negative },
    }
}

/// Background note vocabulary: neutral triage-note words drawn
/// identically for both classes.
pub const NOTE_WORDS: [&str; 200] = [
    "patient", "presents", "with", "history", "of", "mild", "moderate", "severe", "acute",
    "chronic", "onset", "since", "yesterday", "today", "morning", "evening", "overnight", "days",
    "hours", "weeks", "reports", "denies", "states", "mother", "father", "guardian", "child",
    "infant", "toddler", "sibling", "complains", "pain", "ache", "discomfort", "irritable",
    "tired", "fatigue", "lethargic", "alert", "oriented", "crying", "consolable", "fussy",
    "playful", "active", "eating", "drinking", "feeding", "poor", "good", "normal", "decreased",
    "increased", "appetite", "fluids", "intake", "output", "wet", "diapers", "urination", "stool",
    "vomiting", "vomited", "nausea", "diarrhea", "constipation", "abdominal", "stomach", "belly",
    "chest", "back", "head", "neck", "throat", "ear", "ears", "eye", "eyes", "nose", "runny",
    "congestion", "congested", "cough", "coughing", "dry", "productive", "wheeze", "wheezing",
    "breathing", "breath", "shortness", "rapid", "labored", "retractions", "stridor", "hoarse",
    "voice", "swallowing", "drooling", "rash", "hives", "itchy", "red", "swelling", "swollen",
    "bruising", "bleeding", "nosebleed", "discharge", "watery", "fever", "febrile", "chills",
    "sweats", "shivering", "warm", "hot", "cool", "clammy", "pale", "flushed", "color", "skin",
    "dehydration", "hydrated", "tears", "mucous", "membranes", "moist", "dryness", "dizzy",
    "dizziness", "headache", "migraine", "photophobia", "stiff", "soreness", "sore", "tender",
    "tenderness", "injury", "fall", "fell", "hit", "bump", "laceration", "cut", "scrape",
    "sprain", "twisted", "limp", "limping", "weight", "bearing", "walking", "gait", "balance",
    "weakness", "numbness", "tingling", "seizure", "tremor", "shaking", "unresponsive",
    "responsive", "fainted", "syncope", "confusion", "confused", "behavior", "sleep", "sleeping",
    "restless", "waking", "naps", "school", "daycare", "exposure", "contact", "sick", "travel",
    "recent", "immunizations", "vaccines", "current", "allergies", "allergy", "penicillin",
    "none", "known", "asthma", "eczema", "reflux", "anemia", "previous", "visit", "clinic",
    "doctor", "prescribed", "taking",
];

pub const SYMPTOM_WORDS: [&str; 20] = [
    "fever", "cough", "vomiting", "diarrhea", "rash", "headache", "earache", "congestion",
    "wheezing", "fatigue", "dehydration", "irritability", "cramps", "dysuria", "frequency",
    "urgency", "chills", "nausea", "limp", "sore",
];

pub const NEUTRAL_MEDS: [&str; 15] = [
    "acetaminophen", "ibuprofen", "multivitamin", "melatonin", "cetirizine", "loratadine",
    "diphenhydramine", "ondansetron", "dimenhydrinate", "omeprazole", "famotidine", "prednisone",
    "hydrocortisone", "saline", "probiotics",
];
