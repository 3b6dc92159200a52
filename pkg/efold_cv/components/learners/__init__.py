"""In-repo learner implementations behind a fit/predict contract."""
