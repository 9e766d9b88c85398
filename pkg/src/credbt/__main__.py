from credbt.cli import main

main()
