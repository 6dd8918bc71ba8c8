//! Disease-pair configuration documents and the 36 clinical scenarios.

use anyhow::Result;
use std::path::Path;

use tracekg::synthesis::{ClinicalScenario, OutputType};

pub const MG_LEMS_YAML: &str = r#"disease_pair: mg_lems
label: "Myasthenia Gravis vs Lambert-Eaton Myasthenic Syndrome"

classification:
  diseases:
    - short_name: MG
      full_name: Myasthenia gravis
      cuis:
        - C0026896
      text_patterns:
        - myasthenia
        - "myasthenia gravis"
        - achr antibody
        - anti-achr
        - musk antibody
      ontology_id: "OMIM:254200"
      mondo_id: "MONDO:0009688"
    - short_name: LEMS
      full_name: Lambert-Eaton myasthenic syndrome
      cuis:
        - C0022972
      text_patterns:
        - lambert-eaton
        - lambert eaton
        - lems
        - vgcc antibody
      ontology_id: "ORPHA:43393"
      mondo_id: "MONDO:0010264"
  shared:
    cuis:
      - C0027868
    text_patterns:
      - neuromuscular junction
      - fatigable weakness
      - repetitive nerve stimulation
    parent:
      name: Neuromuscular junction disorder
      cui: C0027868

pubmed:
  min_year: 2015
  max_year: 2025
  max_abstracts_per_query: 100
  mesh_terms:
    - '"Myasthenia Gravis"[Mesh]'
    - '"Lambert-Eaton Myasthenic Syndrome"[Mesh]'
  differential_terms:
    - "differential diagnosis"
    - "electrodiagnosis"
  progression_terms:
    - "natural history"
    - "disease progression"
  anchor_categories:
    temporal: ["age of onset", "generalization", "crisis"]
    treatment: ["pyridostigmine", "thymectomy", "immunotherapy"]
    oncologic: ["small-cell lung cancer", "thymoma"]

temporal_predicates:
  - HAS_ONSET_AGE
  - HAS_DIAGNOSIS_AGE
  - GENERALIZED_AT
  - CRISIS_AT
  - REMISSION_AT
  - DEVELOPS_COMPLICATION_AT
  - REQUIRES_INTERVENTION_AT
  - HAS_SURVIVAL_TO
  - HAS_DURATION
  - PRECEDES
  - SYMPTOM_ONSET_AT
  - LOSES_FUNCTION_AT

relevance_keywords:
  - myasthenia
  - lambert-eaton
  - lems
  - neuromuscular junction
  - acetylcholine receptor
  - achr
  - musk
  - thymoma
  - thymectomy
  - pyridostigmine
  - complement
  - eculizumab
  - efgartigimod

temporal:
  fuzzy:
    "late teens": [P17Y, P19Y]
  stage:
    "early childhood": [P1Y, P5Y]

extraction:
  prompt_context: "Focus on autoimmune neuromuscular junction disorders: myasthenia gravis and Lambert-Eaton myasthenic syndrome."
  screening_keywords:
    - myasthenia
    - lambert-eaton
    - neuromuscular junction
  few_shot_examples:
    - "Myasthenia gravis | TREATED_WITH | pyridostigmine"
"#;

pub const DMD_BMD_YAML: &str = r#"disease_pair: dmd_bmd
label: "Duchenne vs Becker Muscular Dystrophy"

classification:
  diseases:
    - short_name: DMD
      full_name: Duchenne muscular dystrophy
      cuis:
        - C0013264
        - C0410189
      text_patterns:
        - duchenne
        - dmd
        - "duchenne muscular dystrophy"
      ontology_id: "OMIM:310200"
      mondo_id: "MONDO:0007803"
    - short_name: BMD
      full_name: Becker muscular dystrophy
      cuis:
        - C0917713
      text_patterns:
        - becker
        - bmd
        - "becker muscular dystrophy"
      ontology_id: "OMIM:300376"
      mondo_id: "MONDO:0010311"
  shared:
    cuis:
      - C0079259
      - C1457887
    text_patterns:
      - dystrophin
      - dystrophinopathy
      - "exon skipping"
    parent:
      name: Dystrophinopathy
      cui: C0872247

pubmed:
  min_year: 2015
  max_year: 2025
  max_abstracts_per_query: 100
  mesh_terms:
    - '"Muscular Dystrophy, Duchenne"[Mesh]'
  differential_terms:
    - "differential diagnosis"
    - "genotype-phenotype"
  progression_terms:
    - "natural history"
    - "disease progression"
  anchor_categories:
    temporal: ["age of onset", "loss of ambulation"]
    cardiac: ["cardiomyopathy", "ejection fraction"]
    treatment: ["corticosteroid", "exon skipping"]

temporal_predicates:
  - HAS_ONSET_AGE
  - HAS_DIAGNOSIS_AGE
  - GENERALIZED_AT
  - CRISIS_AT
  - REMISSION_AT
  - DEVELOPS_COMPLICATION_AT
  - REQUIRES_INTERVENTION_AT
  - HAS_SURVIVAL_TO
  - HAS_DURATION
  - PRECEDES
  - SYMPTOM_ONSET_AT
  - LOSES_FUNCTION_AT

relevance_keywords:
  - duchenne
  - becker
  - muscular dystrophy
  - dystrophin
  - dmd
  - bmd
  - dystrophinopathy
  - exon skipping
  - corticosteroid
  - cardiomyopathy
  - ambulation

temporal:
  fuzzy:
    "late teens": [P17Y, P19Y]
  stage:
    "early childhood": [P1Y, P5Y]

extraction:
  prompt_context: "Focus on dystrophinopathies: Duchenne and Becker muscular dystrophy."
  screening_keywords:
    - duchenne
    - becker
    - dystrophin
  few_shot_examples:
    - "Duchenne muscular dystrophy | TREATED_WITH | prednisone"
"#;

pub const CIDP_GBS_YAML: &str = r#"disease_pair: cidp_gbs
label: "Chronic Inflammatory Demyelinating Polyneuropathy vs Guillain-Barre Syndrome"

classification:
  diseases:
    - short_name: CIDP
      full_name: Chronic inflammatory demyelinating polyneuropathy
      cuis:
        - C0393819
      text_patterns:
        - cidp
        - "chronic inflammatory demyelinating"
      ontology_id: "ORPHA:2932"
      mondo_id: "MONDO:0016146"
    - short_name: GBS
      full_name: Guillain-Barre syndrome
      cuis:
        - C0018378
      text_patterns:
        - guillain-barre
        - guillain barre
        - gbs
      ontology_id: "ORPHA:2103"
      mondo_id: "MONDO:0016218"
  shared:
    cuis:
      - C0011304
    text_patterns:
      - demyelinating polyneuropathy
      - areflexia
      - albuminocytologic dissociation
    parent:
      name: Acquired demyelinating polyneuropathy
      cui: C0011304

pubmed:
  min_year: 2015
  max_year: 2025
  max_abstracts_per_query: 100
  mesh_terms:
    - '"Guillain-Barre Syndrome"[Mesh]'
    - '"Polyradiculoneuropathy, Chronic Inflammatory Demyelinating"[Mesh]'
  differential_terms:
    - "differential diagnosis"
    - "nerve conduction"
  progression_terms:
    - "natural history"
    - "nadir"
  anchor_categories:
    temporal: ["nadir", "recovery onset", "relapse"]
    treatment: ["ivig", "plasma exchange"]

temporal_predicates:
  - HAS_ONSET_AGE
  - HAS_DIAGNOSIS_AGE
  - GENERALIZED_AT
  - CRISIS_AT
  - REMISSION_AT
  - DEVELOPS_COMPLICATION_AT
  - REQUIRES_INTERVENTION_AT
  - HAS_SURVIVAL_TO
  - HAS_DURATION
  - PRECEDES
  - SYMPTOM_ONSET_AT
  - LOSES_FUNCTION_AT

relevance_keywords:
  - cidp
  - guillain-barre
  - guillain barre
  - gbs
  - demyelinating
  - polyneuropathy
  - ivig
  - plasmapheresis
  - nerve conduction
  - areflexia
  - albumin-cytologic

temporal:
  fuzzy:
    "late teens": [P17Y, P19Y]
  stage:
    "early childhood": [P1Y, P5Y]

extraction:
  prompt_context: "Focus on acquired demyelinating polyneuropathies: CIDP and Guillain-Barre syndrome."
  screening_keywords:
    - cidp
    - guillain-barre
    - demyelinating
  few_shot_examples:
    - "Guillain-Barre syndrome | TREATED_WITH | intravenous immunoglobulin"
"#;

pub fn write_pair_configs(root: &Path) -> Result<()> {
    let dir = root.join("pairs");
    std::fs::create_dir_all(&dir)?;
    for (name, text) in [
        ("mg_lems", MG_LEMS_YAML),
        ("dmd_bmd", DMD_BMD_YAML),
        ("cidp_gbs", CIDP_GBS_YAML),
    ] {
        // Parse-validate before writing so a broken template never ships.
        tracekg::pairconfig::load_config(text)?;
        std::fs::write(dir.join(format!("{name}.yaml")), text)?;
    }
    Ok(())
}

struct ScenarioSeed {
    id: &'static str,
    text: &'static str,
    features: &'static [&'static str],
}

const CIDP_GBS_SCENARIOS: [ScenarioSeed; 12] = [
    ScenarioSeed { id: "CIDP_GBS_DDX_01", text: "A middle-aged adult presents with progressive symmetric limb weakness and areflexia evolving over ten weeks. Distinguish chronic inflammatory demyelinating polyneuropathy from Guillain-Barre syndrome for the referring internist.", features: &["nadir", "albuminocytologic dissociation", "nerve conduction", "demyelinating", "relapsing", "progression beyond", "IVIg", "areflexia"] },
    ScenarioSeed { id: "CIDP_GBS_DDX_02", text: "An adult develops ascending weakness two weeks after a diarrhoeal illness. The admitting team asks whether this is Guillain-Barre syndrome or an acute presentation of CIDP.", features: &["antecedent infection", "Campylobacter", "monophasic", "nadir", "acute-onset CIDP", "treatment-related fluctuation", "conduction block", "cerebrospinal fluid", "respiratory"] },
    ScenarioSeed { id: "CIDP_GBS_DDX_03", text: "A patient referred with suspected Guillain-Barre syndrome has deteriorated again nine weeks after initial improvement. Differentiate relapsing GBS from CIDP.", features: &["eight weeks", "relapse", "treatment-related fluctuation", "maintenance therapy", "steroid", "demyelinating", "prognosis", "monitoring", "escalation"] },
    ScenarioSeed { id: "CIDP_GBS_DDX_04", text: "An elderly patient has slowly progressive distal sensory loss, gait instability and proximal weakness. The GP asks whether CIDP is likely and how to exclude GBS.", features: &["distal", "sensory ataxia", "chronic course", "paraprotein", "nerve conduction", "demyelination", "IVIg response", "differential"] },
    ScenarioSeed { id: "CIDP_GBS_SAFETY_01", text: "A rural GP manages a patient with rapidly ascending weakness and new bulbar symptoms. Outline the differential between GBS and CIDP and the immediate safety actions before transfer.", features: &["respiratory failure", "vital capacity", "bulbar", "autonomic instability", "monitoring", "urgent referral", "IVIg", "plasma exchange"] },
    ScenarioSeed { id: "CIDP_GBS_TEMP_01", text: "Compare the temporal course of Guillain-Barre syndrome and CIDP for a trainee: onset tempo, nadir timing, plateau and recovery windows.", features: &["2-4 weeks", "8 weeks", "nadir", "plateau", "recovery", "relapse", "monophasic"] },
    ScenarioSeed { id: "CIDP_GBS_TEMP_02", text: "A patient asks how quickly each condition progresses and when deterioration should trigger re-evaluation. Contrast the GBS and CIDP trajectories with concrete time anchors.", features: &["nadir", "four weeks", "progressive phase", "fluctuation", "re-evaluation", "time anchors"] },
    ScenarioSeed { id: "CIDP_GBS_TEMP_03", text: "Describe the expected disease trajectory for a newly diagnosed CIDP patient over the first two years, with milestone timing for treatment response and relapse risk.", features: &["induction", "maintenance", "relapse", "response window", "taper", "two years", "monitoring"] },
    ScenarioSeed { id: "CIDP_GBS_TEMP_04", text: "Map the recovery timeline after Guillain-Barre syndrome for rehabilitation planning: when does strength return, when does walking resume, what residual deficits persist?", features: &["recovery onset", "ambulation", "residual deficit", "fatigue", "one year", "rehabilitation", "plateau", "prognosis"] },
    ScenarioSeed { id: "CIDP_GBS_TX_01", text: "Recommend first-line and escalation treatment for newly diagnosed CIDP, with expected response timing and monitoring.", features: &["IVIg", "corticosteroids", "plasma exchange", "response", "maintenance", "taper", "monitoring"] },
    ScenarioSeed { id: "CIDP_GBS_TX_02", text: "An intensivist asks for the evidence-based treatment pathway for severe Guillain-Barre syndrome, including what not to use.", features: &["IVIg", "plasma exchange", "corticosteroids ineffective", "timing", "ventilation", "autonomic", "rehabilitation", "prognosis"] },
    ScenarioSeed { id: "CIDP_GBS_TX_03", text: "Outline long-term immunotherapy options for refractory CIDP and the decision points for switching agents.", features: &["subcutaneous immunoglobulin", "rituximab", "azathioprine", "refractory", "switch criteria", "relapse", "dose interval", "adverse effects"] },
];

const DMD_BMD_SCENARIOS: [ScenarioSeed; 12] = [
    ScenarioSeed { id: "DMD_BMD_DDX_01", text: "A 4-year-old boy has delayed motor milestones, calf hypertrophy and a markedly elevated creatine kinase. Differentiate Duchenne from Becker muscular dystrophy for the paediatrician.", features: &["dystrophin", "in-frame", "out-of-frame", "Gowers", "creatine kinase", "genetic testing", "ambulation", "reading frame", "onset age", "cardiomyopathy"] },
    ScenarioSeed { id: "DMD_BMD_DDX_02", text: "A teenager remains ambulant at 16 despite a dystrophinopathy diagnosis in childhood. Which features favour Becker over Duchenne muscular dystrophy?", features: &["ambulation beyond 16", "in-frame deletion", "milder course", "dystrophin quantity", "cardiac involvement", "biopsy", "genotype-phenotype"] },
    ScenarioSeed { id: "DMD_BMD_DDX_03", text: "Genetic testing in a boy with proximal weakness shows a dystrophin deletion of uncertain frame effect. Explain how the reading-frame rule separates DMD from BMD and its exceptions.", features: &["reading frame rule 90-95% accuracy", "exceptions", "exon 44", "revertant", "muscle biopsy", "dystrophin western blot", "phenotype", "counselling"] },
    ScenarioSeed { id: "DMD_BMD_DDX_04", text: "A young man presents with exertional myalgia and hyperCKaemia without fixed weakness. Could this be Becker muscular dystrophy rather than Duchenne, and what is the work-up?", features: &["exertional myalgia", "hyperCKaemia", "Becker", "cardiac screening", "genetic panel", "mild phenotype", "carrier", "biopsy"] },
    ScenarioSeed { id: "DMD_BMD_SAFETY_01", text: "A GP is about to prescribe high-dose oral steroids and plan anaesthesia for a boy with suspected dystrophinopathy. Flag the safety issues that distinguish DMD from BMD management.", features: &["anaesthetic risk", "rhabdomyolysis", "succinylcholine", "fracture", "steroid side effects", "cardiomyopathy surveillance", "respiratory", "specialist referral"] },
    ScenarioSeed { id: "DMD_BMD_TEMP_01", text: "Compare the motor milestone timelines of Duchenne and Becker muscular dystrophy from first symptoms to loss of ambulation.", features: &["Gowers sign", "age 3-5", "loss of ambulation", "age 9-13", "16 years", "wheelchair", "milestones"] },
    ScenarioSeed { id: "DMD_BMD_TEMP_02", text: "Contrast the cardiac and respiratory trajectories of DMD and BMD for surveillance planning, with age anchors for each screening step.", features: &["cardiomyopathy", "ejection fraction", "age 10", "respiratory decline", "nocturnal hypoventilation", "surveillance", "echocardiogram"] },
    ScenarioSeed { id: "DMD_BMD_TEMP_03", text: "A newly diagnosed 4-year-old's parents ask what happens next and when. Produce a structured DMD disease timeline with milestone ages.", features: &["Gowers sign", "ambulation loss", "scoliosis", "cardiac surveillance", "respiratory function", "steroid start", "transition", "adolescence"] },
    ScenarioSeed { id: "DMD_BMD_TEMP_04", text: "Describe the expected adult course of Becker muscular dystrophy, highlighting when cardiac involvement typically outpaces skeletal weakness.", features: &["adult onset", "dilated cardiomyopathy", "third decade", "ambulation preserved", "transplant", "monitoring", "mild skeletal"] },
    ScenarioSeed { id: "DMD_BMD_TX_01", text: "Recommend the corticosteroid regimen for a newly diagnosed ambulant boy with DMD, with timing, monitoring and side-effect management.", features: &["prednisone", "deflazacort", "daily dosing", "bone health", "growth", "weight", "monitoring", "start age", "vaccination"] },
    ScenarioSeed { id: "DMD_BMD_TX_02", text: "Which mutation-specific therapies apply to a boy with an exon 51 skippable deletion, and how is eligibility established?", features: &["exon skipping", "eteplirsen", "genetic confirmation", "ambulatory status", "dystrophin restoration", "infusion", "monitoring"] },
    ScenarioSeed { id: "DMD_BMD_TX_03", text: "Outline cardiac treatment for dystrophinopathy-associated cardiomyopathy across DMD and BMD, including when to start ACE inhibition.", features: &["ACE inhibitor", "beta-blocker", "ejection fraction", "early initiation", "surveillance", "heart failure", "transplant", "BMD"] },
];

const MG_LEMS_SCENARIOS: [ScenarioSeed; 12] = [
    ScenarioSeed { id: "MG_LEMS_DDX_01", text: "A 58-year-old smoker has proximal leg weakness that briefly improves after exercise, dry mouth and reduced reflexes. Differentiate Lambert-Eaton myasthenic syndrome from myasthenia gravis.", features: &["facilitation", "dry mouth", "autonomic", "VGCC antibody", "small-cell lung cancer", "repetitive nerve stimulation", "increment", "proximal", "reflexes", "paraneoplastic"] },
    ScenarioSeed { id: "MG_LEMS_DDX_02", text: "A young woman reports evening ptosis, diplopia and fatigable chewing. Which features point to myasthenia gravis over LEMS and what antibody testing applies?", features: &["ptosis", "diplopia", "fatigability", "AChR antibody", "MuSK", "ocular onset", "decrement", "ice pack", "thymoma", "edrophonium"] },
    ScenarioSeed { id: "MG_LEMS_DDX_03", text: "Electrodiagnostic testing in a patient with fluctuating weakness shows a decremental response at low-rate stimulation. Interpret the findings for MG versus LEMS.", features: &["decrement", "increment", "high-frequency", "post-exercise facilitation", "single-fiber EMG", "jitter", "compound muscle action potential", "baseline amplitude"] },
    ScenarioSeed { id: "MG_LEMS_DDX_04", text: "An older man has seronegative fatigable weakness with prominent autonomic complaints. Lay out the differential pathway between seronegative MG and LEMS.", features: &["seronegative", "autonomic", "VGCC", "MuSK", "LRP4", "malignancy screen", "electrodiagnosis", "trial of therapy", "referral", "follow-up"] },
    ScenarioSeed { id: "MG_LEMS_SAFETY_01", text: "A GP wants to start a beta-blocker and a macrolide in a patient with suspected myasthenia gravis. Identify the safety issues for MG versus LEMS before prescribing.", features: &["aminoglycoside", "macrolide", "beta-blocker", "magnesium", "crisis", "respiratory", "drug caution", "escalation"] },
    ScenarioSeed { id: "MG_LEMS_TEMP_01", text: "Compare the temporal evolution of myasthenia gravis and LEMS from first symptom to diagnosis, including the cancer-screening clock in LEMS.", features: &["ocular onset", "generalization", "two years", "cancer screening", "diagnostic delay", "progression", "screening interval"] },
    ScenarioSeed { id: "MG_LEMS_TEMP_02", text: "Describe how symptom fluctuation differs over a day and over months between MG and LEMS for a diagnostic teaching session.", features: &["diurnal", "fatigability", "exercise", "facilitation", "fluctuation", "remission", "relapse"] },
    ScenarioSeed { id: "MG_LEMS_TEMP_03", text: "A newly diagnosed generalized MG patient asks what the next two years look like. Provide a milestone-anchored trajectory including crisis risk and remission windows.", features: &["generalization", "crisis", "first two years", "remission", "thymectomy timing", "treatment response", "monitoring", "taper"] },
    ScenarioSeed { id: "MG_LEMS_TEMP_04", text: "Plan the tumour-surveillance timeline after a LEMS diagnosis: screening intervals, highest-risk window and when surveillance can stop.", features: &["small-cell lung cancer", "screening interval", "two years", "CT chest", "highest risk", "stop criteria", "smoking"] },
    ScenarioSeed { id: "MG_LEMS_TX_01", text: "Recommend first-line and escalation therapy for generalized AChR-positive myasthenia gravis with timing and monitoring.", features: &["pyridostigmine", "prednisone", "steroid-sparing", "thymectomy", "crisis treatment", "IVIg", "monitoring", "taper"] },
    ScenarioSeed { id: "MG_LEMS_TX_02", text: "Outline treatment for LEMS with and without an underlying malignancy, including symptomatic and immunological options.", features: &["amifampridine", "3,4-diaminopyridine", "tumour treatment", "IVIg", "immunosuppression", "response", "paraneoplastic"] },
    ScenarioSeed { id: "MG_LEMS_TX_03", text: "A patient with refractory MG on maximal conventional therapy asks about newer targeted agents. Summarize the escalation pathway and eligibility.", features: &["eculizumab", "efgartigimod", "rituximab", "refractory", "complement", "FcRn", "eligibility", "monitoring", "vaccination"] },
];

fn seed_type(id: &str) -> OutputType {
    if id.contains("DDX") || id.contains("SAFETY") {
        OutputType::Differential
    } else if id.contains("TEMP_01") || id.contains("TEMP_02") {
        OutputType::TemporalComparative
    } else if id.contains("TEMP") {
        OutputType::Temporal
    } else {
        OutputType::Treatment
    }
}

fn pair_of(id: &str) -> &'static str {
    if id.starts_with("CIDP_GBS") {
        "cidp_gbs"
    } else if id.starts_with("DMD_BMD") {
        "dmd_bmd"
    } else {
        "mg_lems"
    }
}

/// The 36 scenarios in canonical (pair, id) order.
pub fn build_scenarios() -> Vec<ClinicalScenario> {
    CIDP_GBS_SCENARIOS
        .iter()
        .chain(DMD_BMD_SCENARIOS.iter())
        .chain(MG_LEMS_SCENARIOS.iter())
        .map(|seed| ClinicalScenario {
            id: seed.id.to_string(),
            disease_pair: pair_of(seed.id).to_string(),
            output_type: seed_type(seed.id),
            scenario_text: seed.text.to_string(),
            source_reference: "panel-reviewed vignette".to_string(),
            expected_key_features: seed.features.iter().map(|f| f.to_string()).collect(),
        })
        .collect()
}

pub fn write_scenarios(root: &Path) -> Result<Vec<ClinicalScenario>> {
    let scenarios = build_scenarios();
    let dir = root.join("scenarios");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(
        dir.join("scenarios.json"),
        serde_json::to_string_pretty(&scenarios)?,
    )?;
    Ok(scenarios)
}
